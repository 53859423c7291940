#pragma once

// Pump profile, single- and double-pair joint spectral amplitudes, and the
// pair-generation probability. Frequencies are in units of sigma, times in
// units of 1/sigma.

#include <cmath>
#include <complex>

#include "herald/error.hpp"
#include "herald/quadrature.hpp"

namespace herald {

struct SourceParams {
    double sigma = 1.0;   ///< pump sum-frequency bandwidth; the pipeline runs at sigma = 1
    double mu_s = 0.0;    ///< signal phase-matching coefficient (1/sigma)
    double mu_i = 0.0;    ///< idler phase-matching coefficient (1/sigma)
    double kappa_L = 0.0; ///< interaction strength
    double eta = 0.1;     ///< total detection efficiency

    void validate() const
    {
        if (!(sigma > 0.0))
            throw ConfigError("source.sigma must be positive");
        if (!(eta >= 0.0 && eta <= 1.0))
            throw ConfigError("source.eta must lie in [0, 1]");
        if (!(kappa_L >= 0.0))
            throw ConfigError("source.kappa_L must be non-negative");
        if (!std::isfinite(mu_s) || !std::isfinite(mu_i))
            throw ConfigError("phase-matching coefficients must be finite");
    }

    /// Phase-matching argument mu_s*nu_s + mu_i*nu_i.
    double phase(double nu_s, double nu_i) const { return mu_s * nu_s + mu_i * nu_i; }
};

/// exp(-nu^2 / 2 sigma^2)
inline double pump_profile(double nu_sum, double sigma = 1.0)
{
    const double u = nu_sum / sigma;
    return std::exp(-0.5 * u * u);
}

/// sin(x)/x with sinc(0) = 1.
inline double sinc(double x)
{
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

/// d/dx sinc(x)
inline double sinc_d1(double x)
{
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return x * (-1.0 / 3.0 + x2 / 30.0 - x2 * x2 / 840.0);
    }
    return (x * std::cos(x) - std::sin(x)) / (x * x);
}

/// d^2/dx^2 sinc(x)
inline double sinc_d2(double x)
{
    if (std::abs(x) < 1e-2) {
        const double x2 = x * x;
        return -1.0 / 3.0 + x2 / 10.0 - x2 * x2 / 168.0;
    }
    return -sinc(x) - 2.0 * sinc_d1(x) / x;
}

/// Phi1(nu_s, nu_i) = phi(nu_s + nu_i) sinc(mu_s nu_s + mu_i nu_i)
inline double jsa_single(double nu_s, double nu_i, const SourceParams& p)
{
    return pump_profile(nu_s + nu_i, p.sigma) * sinc(p.phase(nu_s, nu_i));
}

namespace detail {

/// |x| below which the double-pair bracket is evaluated from its Taylor series.
inline constexpr double kDoublePairSeriesThreshold = 1e-4;

/// [sinc(X + x) - exp(-i x) sinc(X)] / (2x), evaluated as written.
inline std::complex<double> double_pair_bracket_direct(double X, double x)
{
    const std::complex<double> phase(std::cos(x), -std::sin(x));
    return (sinc(X + x) - phase * sinc(X)) / (2.0 * x);
}

/// Series about x = 0: (s' + i s)/2 + x (s'' + s)/4, s = sinc(X).
inline std::complex<double> double_pair_bracket_series(double X, double x)
{
    const double s = sinc(X);
    const double d1 = sinc_d1(X);
    const double d2 = sinc_d2(X);
    return {0.5 * d1 + 0.25 * x * (d2 + s), 0.5 * s};
}

inline std::complex<double> double_pair_bracket(double X, double x)
{
    if (std::abs(x) < kDoublePairSeriesThreshold)
        return double_pair_bracket_series(X, x);
    return double_pair_bracket_direct(X, x);
}

} // namespace detail

/// Phi2(nu_s, nu_s', nu_i, nu_i'), finite across the removable singularity at
/// mu_s nu_s' + mu_i nu_i' = 0.
inline std::complex<double> jsa_double(double nu_s, double nu_s2, double nu_i, double nu_i2,
                                       const SourceParams& p)
{
    const double envelope = pump_profile(nu_s + nu_i, p.sigma) * pump_profile(nu_s2 + nu_i2, p.sigma);
    return envelope * detail::double_pair_bracket(p.phase(nu_s, nu_i), p.phase(nu_s2, nu_i2));
}

struct PairProbability {
    double p_single = 0.0;    ///< integral of |Phi1|^2 over the truncation window
    double single_pair = 0.0; ///< (kappa L)^2 p
    double double_pair = 0.0; ///< (kappa L)^4 p^2, i.e. single_pair^2
    double window = 0.0;
    double total() const { return single_pair + double_pair; }
};

/// Pair-generation probability; the same grid is used for both frequency axes.
inline PairProbability pair_probability(const SourceParams& p, const FreqGrid& g)
{
    if (!(g.window() > 0.0))
        throw ConfigError("truncation window must be positive");
    p.validate();
    PairProbability out;
    out.window = g.window();
    double acc = 0.0;
    for (std::size_t a = 0; a < g.size(); ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < g.size(); ++b) {
            const double v = jsa_single(g.nodes[a], g.nodes[b], p);
            row += g.weights[b] * v * v;
        }
        acc += g.weights[a] * row;
    }
    out.p_single = acc;
    const double k2 = p.kappa_L * p.kappa_L;
    out.single_pair = k2 * acc;
    out.double_pair = out.single_pair * out.single_pair;
    return out;
}

} // namespace herald
