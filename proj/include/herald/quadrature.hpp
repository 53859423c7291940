#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <utility>
#include <vector>

#include "herald/error.hpp"

namespace herald {

/// Quadrature rule on a closed frequency interval [lo, hi] (units of sigma).
struct FreqGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lo = 0.0;
    double hi = 0.0;

    std::size_t size() const { return nodes.size(); }
    double length() const { return hi - lo; }
    /// Half-width of a symmetric grid.
    double window() const { return 0.5 * (hi - lo); }

    /// n-point Gauss-Legendre rule on [lo, hi].
    static FreqGrid gauss_legendre(double lo, double hi, std::size_t n);
    /// Gauss-Legendre rule on [-W, W].
    static FreqGrid symmetric(double W, std::size_t n) { return gauss_legendre(-W, W, n); }
};

inline FreqGrid FreqGrid::gauss_legendre(double lo, double hi, std::size_t n)
{
    if (!(hi > lo))
        throw ConfigError("quadrature interval must have positive length");
    if (n == 0)
        throw ConfigError("quadrature needs at least one node");

    FreqGrid g;
    g.lo = lo;
    g.hi = hi;
    g.nodes.resize(n);
    g.weights.resize(n);

    // P_n(x) and P_n'(x) by the three-term recurrence.
    const auto legendre = [n](double x) {
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
            p0 = p1;
            p1 = pk;
        }
        const double dp = static_cast<double>(n) * (p0 - x * p1) / (1.0 - x * x);
        return std::pair{p1, dp};
    };

    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[i] = mid - half * x;
        g.nodes[n - 1 - i] = mid + half * x;
        g.weights[i] = half * w;
        g.weights[n - 1 - i] = half * w;
    }
    if (n % 2 == 1)
        g.nodes[n / 2] = mid;
    return g;
}

/// Midpoint samples of [lo, hi]; exact weights for piecewise-constant integrands.
struct UniformSamples {
    std::vector<double> nodes;
    double step = 0.0;

    static UniformSamples midpoints(double lo, double hi, std::size_t n)
    {
        if (!(hi > lo) || n == 0)
            throw ConfigError("uniform sampling needs a positive interval and n > 0");
        UniformSamples u;
        u.step = (hi - lo) / static_cast<double>(n);
        u.nodes.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            u.nodes[j] = lo + (static_cast<double>(j) + 0.5) * u.step;
        return u;
    }
};

} // namespace herald
