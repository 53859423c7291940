#pragma once

// Coherence times as power-equivalent widths, tau = integral of |gamma(t)|^2 dt,
// where gamma is the normalized first-order temporal coherence function, i.e.
// the normalized Fourier transform of a spectral density.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "herald/error.hpp"
#include "herald/quadrature.hpp"
#include "herald/spectral.hpp"

namespace herald {

/// Tag written into every report and manifest.
inline constexpr const char* kCoherenceDefinition = "power_equivalent_width";

/// Coherence time of a spectral density sampled with uniform spacing `dnu`.
/// gamma is obtained by zero-padded FFT and |gamma|^2 is summed over one period.
inline double power_equivalent_width(std::span<const double> density, double dnu)
{
    if (density.empty() || !(dnu > 0.0))
        throw ConfigError("coherence time needs a non-empty, uniformly spaced spectrum");
    double total = 0.0;
    for (double s : density)
        total += s;
    if (!(total > 0.0))
        throw NumericalError("spectral density integrates to zero");

    std::size_t nfft = 1;
    while (nfft < 4 * density.size())
        nfft <<= 1;
    std::vector<std::complex<double>> in(nfft, 0.0), out;
    for (std::size_t j = 0; j < density.size(); ++j)
        in[j] = density[j];
    Eigen::FFT<double> fft;
    fft.fwd(out, in);

    const double dt = 1.0 / (static_cast<double>(nfft) * dnu);
    double acc = 0.0;
    for (const auto& z : out)
        acc += std::norm(z / total);
    return acc * dt;
}

/// Sample `density(nu)` at the midpoints of [lo, hi] and return its coherence time.
template <class Density>
double coherence_time_of(Density&& density, double lo, double hi, std::size_t samples)
{
    const auto u = UniformSamples::midpoints(lo, hi, samples);
    std::vector<double> s(u.nodes.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = density(u.nodes[j]);
    return power_equivalent_width(s, u.step);
}

/// Pump coherence time. The pump profile exp(-nu^2/2 sigma^2) is taken as the
/// spectral density, giving 1/(2 sqrt(pi) sigma).
inline double pump_coherence_time(double sigma, std::size_t samples = 1024)
{
    const double L = 10.0 * sigma;
    return coherence_time_of([sigma](double nu) { return pump_profile(nu, sigma); }, -L, L, samples);
}

/// Coherence time of the signal photons passed by the band [lo, hi]: the
/// density is the signal marginal of |Phi1|^2, integrated over the idler grid.
inline double signal_coherence_time(const SourceParams& p, double lo, double hi, const FreqGrid& idler,
                                    std::size_t samples = 1024)
{
    return coherence_time_of(
        [&](double nu_s) {
            double acc = 0.0;
            for (std::size_t b = 0; b < idler.size(); ++b) {
                const double v = jsa_single(nu_s, idler.nodes[b], p);
                acc += idler.weights[b] * v * v;
            }
            return acc;
        },
        lo, hi, samples);
}

} // namespace herald
