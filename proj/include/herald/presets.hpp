#pragma once

#include <array>
#include <string>
#include <string_view>

#include "herald/error.hpp"
#include "herald/spectral.hpp"

namespace herald {

struct Preset {
    std::string_view name;
    std::string_view description;
    double mu_s;
    double mu_i;
    bool unfiltered; ///< bare signal detector, no spectral or temporal filter

    SourceParams source() const
    {
        SourceParams p;
        p.mu_s = mu_s;
        p.mu_i = mu_i;
        return p;
    }
};

inline constexpr std::array<Preset, 6> kPresets{{
    {"state1", "no phase-matching delay (strongly correlated)", 0.0, 0.0, false},
    {"state2", "nearly factorable with signal delay only", 10.0, 0.0, false},
    {"state3", "moderate signal delay", 2.6, 0.0, false},
    {"state4", "opposite-sign delays", -1.33, 0.45, false},
    {"state5", "symmetric opposite delays", -1.3, 1.3, false},
    {"state6", "highly factorable and unfiltered", 25.0, 0.0, true},
}};

inline const Preset& find_preset(std::string_view name)
{
    for (const auto& p : kPresets)
        if (p.name == name)
            return p;
    throw ConfigError("unknown preset '" + std::string(name) + "' (see 'presets list')");
}

} // namespace herald
