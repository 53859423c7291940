#pragma once

// Time-and-band-limiting measurement modes. The operator that band-limits to
// [-B/2, B/2] and then gates to a window of width T acts in frequency as the
// kernel sin(pi T (nu - nu')) / (pi (nu - nu')). Its eigenfunctions are the
// prolate spheroidal modes phi_m(c, nu) and its eigenvalues the per-mode
// transmissions chi_m(c), c = pi B T / 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "herald/error.hpp"
#include "herald/quadrature.hpp"

namespace herald {

struct FilterParams {
    double B = 1.0; ///< spectral filter bandwidth (sigma)
    double T = 1.0; ///< temporal gate width (1/sigma)

    double c() const { return 0.5 * std::numbers::pi * B * T; }

    void validate() const
    {
        if (!(B > 0.0) || !std::isfinite(B))
            throw ConfigError("filter.B must be positive");
        if (!(T > 0.0) || !std::isfinite(T))
            throw ConfigError("filter.T must be positive");
    }
};

struct BasisOptions {
    std::size_t nodes = 64; ///< Gauss-Legendre nodes on the filter band
    double tol = 1e-6;      ///< smallest retained chi_m
    std::size_t m_cap = 32; ///< maximum number of retained modes
};

/// Measurement modes sampled on the signal quadrature grid.
///
/// `modes(k, m)` is phi_m at `grid.nodes[k]`; columns are orthonormal under the
/// grid weights. A complete basis (the unfiltered detector) has chi_m = 1 for
/// every mode and spans the whole signal grid.
struct ProlateBasis {
    FreqGrid grid;
    std::vector<double> chi;      ///< retained eigenvalues, descending
    std::vector<double> spectrum; ///< every Nystrom eigenvalue, descending
    Eigen::MatrixXd modes;
    double B = 0.0;
    double T = 0.0;
    bool complete = false;

    std::size_t size() const { return chi.size(); }
    double c() const { return 0.5 * std::numbers::pi * B * T; }
};

/// sin(pi T d) / (pi d), with the diagonal value T.
inline double limiting_kernel(double d, double T)
{
    const double a = std::numbers::pi * T * d;
    if (std::abs(a) < 1e-8)
        return T * (1.0 - a * a / 6.0);
    return std::sin(a) / (std::numbers::pi * d);
}

/// Nystrom diagonalization of the limiting kernel on the Gauss-Legendre grid.
inline ProlateBasis build_basis(const FilterParams& f, const BasisOptions& opt = {})
{
    f.validate();
    if (!(opt.tol > 0.0 && opt.tol < 1.0))
        throw ConfigError("mode tolerance must lie in (0, 1)");
    if (opt.m_cap < 1)
        throw ConfigError("m_cap must be at least 1");

    ProlateBasis basis;
    basis.B = f.B;
    basis.T = f.T;
    basis.grid = FreqGrid::gauss_legendre(-0.5 * f.B, 0.5 * f.B, opt.nodes);
    const auto& g = basis.grid;
    const auto n = static_cast<Eigen::Index>(g.size());

    Eigen::VectorXd sw(n);
    for (Eigen::Index k = 0; k < n; ++k)
        sw(k) = std::sqrt(g.weights[k]);

    Eigen::MatrixXd A(n, n);
    for (Eigen::Index a = 0; a < n; ++a)
        for (Eigen::Index b = 0; b <= a; ++b) {
            const double v = sw(a) * limiting_kernel(g.nodes[a] - g.nodes[b], f.T) * sw(b);
            A(a, b) = v;
            A(b, a) = v;
        }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.info() != Eigen::Success)
        throw NumericalError("limiting-kernel eigensolver did not converge");

    // Eigen returns ascending order.
    const Eigen::VectorXd& ev = es.eigenvalues();
    basis.spectrum.resize(g.size());
    for (Eigen::Index k = 0; k < n; ++k)
        basis.spectrum[k] = ev(n - 1 - k);

    const auto retained = static_cast<std::size_t>(
        std::count_if(basis.spectrum.begin(), basis.spectrum.end(), [&](double x) { return x >= opt.tol; }));
    if (retained > opt.m_cap)
        throw NumericalError("c = " + std::to_string(f.c()) + " needs " + std::to_string(retained) +
                             " modes above tolerance but m_cap = " + std::to_string(opt.m_cap));
    if (retained == 0)
        throw NumericalError("no measurement mode reaches the retention tolerance");

    // Sign reference: the smallest positive node.
    Eigen::Index ref = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < n; ++k)
        if (g.nodes[k] > 0.0 && g.nodes[k] < best) {
            best = g.nodes[k];
            ref = k;
        }

    const auto M = static_cast<Eigen::Index>(retained);
    basis.chi.assign(basis.spectrum.begin(), basis.spectrum.begin() + M);
    basis.modes.resize(n, M);
    for (Eigen::Index m = 0; m < M; ++m) {
        Eigen::VectorXd u = es.eigenvectors().col(n - 1 - m);
        if (u(ref) < 0.0)
            u = -u;
        basis.modes.col(m) = u.cwiseQuotient(sw);
    }
    return basis;
}

/// Complete, lossless basis on a signal grid: the detector without filters.
/// Mode k is the discrete delta at node k, normalized under the weights.
inline ProlateBasis identity_basis(const FreqGrid& signal_grid)
{
    ProlateBasis basis;
    basis.grid = signal_grid;
    basis.complete = true;
    basis.B = signal_grid.length();
    basis.T = std::numeric_limits<double>::infinity();
    const auto n = static_cast<Eigen::Index>(signal_grid.size());
    basis.chi.assign(signal_grid.size(), 1.0);
    basis.spectrum = basis.chi;
    basis.modes = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k)
        basis.modes(k, k) = 1.0 / std::sqrt(signal_grid.weights[k]);
    return basis;
}

/// eta_m = eta chi_m
inline std::vector<double> detection_efficiencies(const ProlateBasis& basis, double eta)
{
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ConfigError("eta must lie in [0, 1]");
    std::vector<double> out(basis.chi.size());
    std::transform(basis.chi.begin(), basis.chi.end(), out.begin(), [eta](double c) { return eta * c; });
    return out;
}

} // namespace herald
