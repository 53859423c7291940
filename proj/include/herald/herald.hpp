#pragma once

#include "herald/coherence.hpp"
#include "herald/error.hpp"
#include "herald/heralding.hpp"
#include "herald/optimizer.hpp"
#include "herald/parallel.hpp"
#include "herald/presets.hpp"
#include "herald/prolate.hpp"
#include "herald/quadrature.hpp"
#include "herald/schmidt.hpp"
#include "herald/spectral.hpp"
