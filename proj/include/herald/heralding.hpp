#pragma once

// Heralded idler wavefunctions, click probabilities, the heralded one-photon
// density matrix and the figures of merit H (heralding efficiency) and R
// (production rate).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "herald/coherence.hpp"
#include "herald/error.hpp"
#include "herald/parallel.hpp"
#include "herald/prolate.hpp"
#include "herald/quadrature.hpp"
#include "herald/spectral.hpp"

namespace herald {

/// Largest interaction strength accepted by the two-pair truncation.
inline constexpr double kMaxKappaL = 0.5;

struct Numerics {
    std::size_t signal_nodes = 64;             ///< nodes on the filter band
    std::size_t idler_nodes = 64;              ///< nodes on [-W, W] for the idler
    std::size_t unfiltered_signal_nodes = 128; ///< signal nodes on [-W, W] without filters
    double window = 4.0;                       ///< truncation half-width W
    double tol = 1e-6;
    std::size_t m_cap = 32;
    std::size_t coherence_samples = 1024;
    Exec exec;

    BasisOptions basis_options() const { return {signal_nodes, tol, m_cap}; }
    FreqGrid idler_grid() const { return FreqGrid::symmetric(window, idler_nodes); }

    void validate() const
    {
        if (!(window > 0.0))
            throw ConfigError("numerics.window must be positive");
        if (signal_nodes < 2 || idler_nodes < 2 || unfiltered_signal_nodes < 2)
            throw ConfigError("numerics node counts must be at least 2");
        if (coherence_samples < 8)
            throw ConfigError("numerics.coherence_samples must be at least 8");
    }
};

/// Spectral and temporal filtering in front of the signal detector. An empty
/// filter means the bare detector: every signal mode is transmitted (chi = 1).
struct Measurement {
    std::optional<FilterParams> filter;

    static Measurement filtered(double B, double T) { return {FilterParams{B, T}}; }
    static Measurement none() { return {}; }
    bool unfiltered() const { return !filter.has_value(); }
};

/// Signal modes for a measurement: prolate modes behind a filter, or the
/// complete delta basis on [-W, W] for the bare detector.
inline ProlateBasis measurement_basis(const Measurement& m, const Numerics& num)
{
    if (m.unfiltered())
        return identity_basis(FreqGrid::symmetric(num.window, num.unfiltered_signal_nodes));
    return build_basis(*m.filter, num.basis_options());
}

/// psi_m(nu_i) = integral over the band of phi_m(nu_s) Phi1(nu_s, nu_i).
/// Row m, column = idler node.
inline Eigen::MatrixXd heralded_psi1(const ProlateBasis& basis, const SourceParams& p, const FreqGrid& idler)
{
    const auto& g = basis.grid;
    const auto ns = static_cast<Eigen::Index>(g.size());
    const auto ni = static_cast<Eigen::Index>(idler.size());
    Eigen::MatrixXd J(ns, ni);
    for (Eigen::Index k = 0; k < ns; ++k)
        for (Eigen::Index i = 0; i < ni; ++i)
            J(k, i) = g.weights[k] * jsa_single(g.nodes[k], idler.nodes[i], p);
    return basis.modes.transpose() * J;
}

/// psi_{m,m'}(nu_i, nu_i') for m <= m'. Symmetric in the mode pair.
class Psi2Tensor {
public:
    Psi2Tensor() = default;
    Psi2Tensor(std::size_t modes, std::size_t idler)
        : modes_(modes), data_(modes * (modes + 1) / 2,
                               Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(idler),
                                                      static_cast<Eigen::Index>(idler)))
    {
    }

    std::size_t modes() const { return modes_; }

    Eigen::MatrixXcd& operator()(std::size_t m, std::size_t mp) { return data_[index(m, mp)]; }
    const Eigen::MatrixXcd& operator()(std::size_t m, std::size_t mp) const { return data_[index(m, mp)]; }

private:
    std::size_t index(std::size_t m, std::size_t mp) const
    {
        if (m > mp)
            std::swap(m, mp);
        return m * (2 * modes_ - m + 1) / 2 + (mp - m);
    }

    std::size_t modes_ = 0;
    std::vector<Eigen::MatrixXcd> data_;
};

namespace detail {

/// Phase-matching arguments over a (signal grid) x (idler grid) table with the
/// trigonometric values the double-pair bracket needs.
struct PhaseTable {
    Eigen::MatrixXd X, sinX, cosX, sincX, d1, d2;
    Eigen::MatrixXd envelope; ///< w_k phi(nu_k + nu_i)

    PhaseTable(const FreqGrid& sig, const FreqGrid& idl, const SourceParams& p)
    {
        const auto ns = static_cast<Eigen::Index>(sig.size());
        const auto ni = static_cast<Eigen::Index>(idl.size());
        X.resize(ns, ni);
        sinX.resize(ns, ni);
        cosX.resize(ns, ni);
        sincX.resize(ns, ni);
        d1.resize(ns, ni);
        d2.resize(ns, ni);
        envelope.resize(ns, ni);
        for (Eigen::Index k = 0; k < ns; ++k)
            for (Eigen::Index i = 0; i < ni; ++i) {
                const double x = p.phase(sig.nodes[k], idl.nodes[i]);
                X(k, i) = x;
                sinX(k, i) = std::sin(x);
                cosX(k, i) = std::cos(x);
                sincX(k, i) = sinc(x);
                d1(k, i) = sinc_d1(x);
                d2(k, i) = sinc_d2(x);
                envelope(k, i) = sig.weights[k] * pump_profile(sig.nodes[k] + idl.nodes[i], p.sigma);
            }
    }

    /// Double-pair bracket between table entries (k, i) and (l, j).
    std::complex<double> bracket(Eigen::Index k, Eigen::Index i, Eigen::Index l, Eigen::Index j) const
    {
        const double x = X(l, j);
        if (std::abs(x) < kDoublePairSeriesThreshold)
            return {0.5 * d1(k, i) + 0.25 * x * (d2(k, i) + sincX(k, i)), 0.5 * sincX(k, i)};
        const double y = X(k, i) + x;
        const double s_sum = std::abs(y) < 1e-4
                                 ? 1.0 - y * y / 6.0
                                 : (sinX(k, i) * cosX(l, j) + cosX(k, i) * sinX(l, j)) / y;
        const double s = sincX(k, i);
        const double inv = 0.5 / x;
        return {(s_sum - cosX(l, j) * s) * inv, sinX(l, j) * s * inv};
    }
};

inline std::vector<double> pair_weights(const std::vector<double>& eta_m)
{
    const std::size_t M = eta_m.size();
    std::vector<double> c(M * M, 0.0);
    for (std::size_t m = 0; m < M; ++m)
        for (std::size_t mp = m; mp < M; ++mp)
            c[m * M + mp] = (m == mp) ? eta_m[m] - 0.5 * eta_m[m] * eta_m[m]
                                      : eta_m[m] + eta_m[mp] - eta_m[m] * eta_m[mp];
    return c;
}

} // namespace detail

/// Symmetrized double integral of Phi2 against phi_m phi_m' for all m <= m'.
inline Psi2Tensor heralded_psi2(const ProlateBasis& basis, const SourceParams& p, const FreqGrid& idler,
                                const Exec& exec = {})
{
    const auto M = static_cast<Eigen::Index>(basis.size());
    const auto ni = static_cast<Eigen::Index>(idler.size());
    const detail::PhaseTable tab(basis.grid, idler, p);
    const auto ns = static_cast<Eigen::Index>(basis.grid.size());

    // C_j(k, m) = w_k phi(nu_k + nu_j) phi_m(nu_k)
    std::vector<Eigen::MatrixXd> C(static_cast<std::size_t>(ni));
    for (Eigen::Index j = 0; j < ni; ++j)
        C[j] = tab.envelope.col(j).asDiagonal() * basis.modes;

    Psi2Tensor out(basis.size(), idler.size());
    parallel_for(static_cast<std::size_t>(ni), exec, [&](std::size_t iu) {
        const auto i = static_cast<Eigen::Index>(iu);
        Eigen::MatrixXcd F(ns, ns);
        for (Eigen::Index j = 0; j < ni; ++j) {
            for (Eigen::Index l = 0; l < ns; ++l)
                for (Eigen::Index k = 0; k < ns; ++k)
                    F(k, l) = tab.bracket(k, i, l, j);
            const Eigen::MatrixXcd Y = C[i].transpose().cast<std::complex<double>>() *
                                       (F * C[j].cast<std::complex<double>>());
            for (Eigen::Index m = 0; m < M; ++m)
                for (Eigen::Index mp = m; mp < M; ++mp)
                    out(m, mp)(i, j) = Y(m, mp) + Y(mp, m);
        }
    });
    return out;
}

struct ClickProbabilities {
    double Ps1 = 0.0; ///< single-pair click coefficient
    double Ps2 = 0.0; ///< double-pair click coefficient

    /// P_s = (kappa L)^2 Ps1 + (kappa L)^4 Ps2
    double Ps(double kappa_L) const
    {
        const double k2 = kappa_L * kappa_L;
        return k2 * Ps1 + k2 * k2 * Ps2;
    }
};

inline double single_click_coefficient(const std::vector<double>& eta_m, const Eigen::MatrixXd& psi1,
                                       const FreqGrid& idler)
{
    double acc = 0.0;
    for (Eigen::Index m = 0; m < psi1.rows(); ++m) {
        double norm = 0.0;
        for (Eigen::Index i = 0; i < psi1.cols(); ++i)
            norm += idler.weights[i] * psi1(m, i) * psi1(m, i);
        acc += eta_m[m] * norm;
    }
    return acc;
}

inline double double_click_coefficient(const std::vector<double>& eta_m, const Psi2Tensor& psi2,
                                       const FreqGrid& idler)
{
    const std::size_t M = psi2.modes();
    const auto coef = detail::pair_weights(eta_m);
    const auto ni = static_cast<Eigen::Index>(idler.size());
    double acc = 0.0;
    for (Eigen::Index i = 0; i < ni; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < ni; ++j) {
            double cell = 0.0;
            for (std::size_t m = 0; m < M; ++m)
                for (std::size_t mp = m; mp < M; ++mp)
                    cell += coef[m * M + mp] * std::norm(psi2(m, mp)(i, j));
            row += idler.weights[j] * cell;
        }
        acc += idler.weights[i] * row;
    }
    return acc;
}

/// Ps2 for a complete basis with uniform efficiency eta: by completeness the
/// mode sum collapses to (eta - eta^2/2) times the integral of
/// |Phi2(s, s', i, i') + Phi2(s', s, i, i')|^2 over all four frequencies.
inline double double_click_complete(double eta, const SourceParams& p, const FreqGrid& signal,
                                    const FreqGrid& idler, const Exec& exec = {})
{
    const detail::PhaseTable tab(signal, idler, p);
    const auto ns = static_cast<Eigen::Index>(signal.size());
    const auto ni = static_cast<Eigen::Index>(idler.size());
    std::vector<double> rows(static_cast<std::size_t>(ni), 0.0);
    parallel_for(static_cast<std::size_t>(ni), exec, [&](std::size_t iu) {
        const auto i = static_cast<Eigen::Index>(iu);
        double row = 0.0;
        for (Eigen::Index j = 0; j < ni; ++j) {
            double cell = 0.0;
            for (Eigen::Index k = 0; k < ns; ++k) {
                const double ek = tab.envelope(k, i);
                for (Eigen::Index l = 0; l < ns; ++l) {
                    // envelope already carries one weight per signal frequency
                    const std::complex<double> g = tab.bracket(k, i, l, j) * (ek * tab.envelope(l, j)) +
                                                   tab.bracket(l, i, k, j) * (tab.envelope(l, i) * tab.envelope(k, j));
                    cell += std::norm(g) / (signal.weights[k] * signal.weights[l]);
                }
            }
            row += idler.weights[j] * cell;
        }
        rows[iu] = idler.weights[i] * row;
    });
    double acc = 0.0;
    for (double r : rows)
        acc += r;
    return (eta - 0.5 * eta * eta) * acc;
}

inline ClickProbabilities click_probabilities(const ProlateBasis& basis, const SourceParams& p,
                                              const FreqGrid& idler, const Exec& exec = {})
{
    const auto eta_m = detection_efficiencies(basis, p.eta);
    const auto psi1 = heralded_psi1(basis, p, idler);
    ClickProbabilities out;
    out.Ps1 = single_click_coefficient(eta_m, psi1, idler);
    if (basis.complete)
        out.Ps2 = double_click_complete(p.eta, p, basis.grid, idler, exec);
    else
        out.Ps2 = double_click_coefficient(eta_m, heralded_psi2(basis, p, idler, exec), idler);
    return out;
}

struct DensitySpectrum {
    std::vector<double> lambda; ///< eigenvalues of rho^(1), descending
    std::vector<double> mode;   ///< |0>_i sampled on the idler nodes, unit norm
    double min_eigenvalue = 0.0;
    double lambda0() const { return lambda.front(); }
};

/// Tolerance on negative eigenvalues of the heralded density matrix.
inline constexpr double kPsdTolerance = 1e-9;

/// rho^(1)(nu, nu') = sum_m eta_m psi_m(nu) psi_m(nu') / Ps1, diagonalized as
/// sqrt(w) rho sqrt(w) so that eigenvectors are orthonormal in L2.
inline DensitySpectrum heralded_density_matrix(const std::vector<double>& eta_m, const Eigen::MatrixXd& psi1,
                                               const FreqGrid& idler)
{
    const double Ps1 = single_click_coefficient(eta_m, psi1, idler);
    if (!(Ps1 > 0.0))
        throw NumericalError("no click probability: the heralded state is undefined");
    const auto ni = static_cast<Eigen::Index>(idler.size());
    Eigen::VectorXd sw(ni);
    for (Eigen::Index i = 0; i < ni; ++i)
        sw(i) = std::sqrt(idler.weights[i]);

    Eigen::MatrixXd Q = psi1 * sw.asDiagonal(); // M x Ni
    for (Eigen::Index m = 0; m < Q.rows(); ++m)
        Q.row(m) *= std::sqrt(eta_m[m] / Ps1);
    Eigen::MatrixXd rho = Q.transpose() * Q;
    rho = 0.5 * (rho + rho.transpose()).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho);
    if (es.info() != Eigen::Success)
        throw NumericalError("density-matrix eigensolver did not converge");
    DensitySpectrum out;
    out.lambda.resize(static_cast<std::size_t>(ni));
    for (Eigen::Index k = 0; k < ni; ++k)
        out.lambda[k] = es.eigenvalues()(ni - 1 - k);
    out.min_eigenvalue = es.eigenvalues()(0);
    if (out.min_eigenvalue < -kPsdTolerance)
        throw NumericalError("heralded density matrix is not positive semidefinite (min eigenvalue " +
                             std::to_string(out.min_eigenvalue) + ")");

    Eigen::VectorXd u = es.eigenvectors().col(ni - 1);
    Eigen::Index peak = 0;
    u.cwiseAbs().maxCoeff(&peak);
    if (u(peak) < 0.0)
        u = -u;
    out.mode.resize(static_cast<std::size_t>(ni));
    for (Eigen::Index i = 0; i < ni; ++i)
        out.mode[i] = u(i) / sw(i);
    return out;
}

/// The dominant heralded mode as a function of idler frequency, by Nystrom
/// interpolation: v(nu) = sum_m eta_m psi_m(nu) <psi_m, v> / (lambda0 Ps1).
class HeraldedMode {
public:
    HeraldedMode(const ProlateBasis& basis, const SourceParams& p, const std::vector<double>& eta_m,
                 const Eigen::MatrixXd& psi1, const FreqGrid& idler, const DensitySpectrum& dens)
        : nodes_(basis.grid.nodes), source_(p)
    {
        const double Ps1 = single_click_coefficient(eta_m, psi1, idler);
        Eigen::VectorXd c(psi1.rows());
        for (Eigen::Index m = 0; m < psi1.rows(); ++m) {
            double overlap = 0.0;
            for (Eigen::Index i = 0; i < psi1.cols(); ++i)
                overlap += idler.weights[i] * psi1(m, i) * dens.mode[i];
            c(m) = eta_m[m] * overlap / (dens.lambda0() * Ps1);
        }
        // q_k = w_k sum_m phi_m(nu_k) c_m
        Eigen::VectorXd q = basis.modes * c;
        q_.resize(nodes_.size());
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            q_[k] = basis.grid.weights[k] * q(static_cast<Eigen::Index>(k));
    }

    double operator()(double nu) const
    {
        double acc = 0.0;
        for (std::size_t k = 0; k < nodes_.size(); ++k)
            acc += q_[k] * jsa_single(nodes_[k], nu, source_);
        return acc;
    }

private:
    std::vector<double> nodes_;
    std::vector<double> q_;
    SourceParams source_;
};

struct CoherenceTimes {
    double pump = 0.0;
    double signal = 0.0;
    double heralded = 0.0;
};

/// Pump, filtered-signal and heralded-mode coherence times.
inline CoherenceTimes coherence_times(const SourceParams& p, const ProlateBasis& basis, const HeraldedMode& mode,
                                      const FreqGrid& idler, std::size_t samples = 1024)
{
    CoherenceTimes t;
    t.pump = pump_coherence_time(p.sigma, samples);
    t.signal = signal_coherence_time(p, basis.grid.lo, basis.grid.hi, idler, samples);
    t.heralded = coherence_time_of(
        [&](double nu) {
            const double v = mode(nu);
            return v * v;
        },
        idler.lo, idler.hi, samples);
    return t;
}

/// T_min = max(T, 4 tau_p, 4 tau_s, 4 tau_0); the gate term is absent without filters.
inline double minimum_cycle(const Measurement& m, const CoherenceTimes& t)
{
    double out = 4.0 * std::max({t.pump, t.signal, t.heralded});
    if (m.filter)
        out = std::max(out, m.filter->T);
    return out;
}

/// Everything about a (source, measurement) pair that does not depend on kappa L.
struct HeraldingModel {
    SourceParams source;
    Measurement measurement;
    Numerics numerics;

    std::vector<double> chi;
    double Ps1 = 0.0;
    double Ps2 = 0.0;
    bool has_double_pair = false;
    DensitySpectrum density;
    std::vector<double> idler_nodes;
    CoherenceTimes tau;
    double Tmin = 0.0;
    double p_single = 0.0;

    double lambda0() const { return density.lambda0(); }
};

enum class Detail {
    weak_pump, ///< skip the double-pair tensor (Ps2 left at zero)
    full,
};

inline HeraldingModel analyze(const SourceParams& p, const Measurement& m, const Numerics& num,
                              Detail detail = Detail::full)
{
    p.validate();
    num.validate();
    if (m.filter)
        m.filter->validate();

    HeraldingModel out;
    out.source = p;
    out.measurement = m;
    out.numerics = num;

    const auto basis = measurement_basis(m, num);
    const auto idler = num.idler_grid();
    const auto eta_m = detection_efficiencies(basis, p.eta);
    const auto psi1 = heralded_psi1(basis, p, idler);

    out.chi = basis.chi;
    out.Ps1 = single_click_coefficient(eta_m, psi1, idler);
    out.density = heralded_density_matrix(eta_m, psi1, idler);
    out.idler_nodes = idler.nodes;
    const HeraldedMode mode(basis, p, eta_m, psi1, idler, out.density);
    out.tau = coherence_times(p, basis, mode, idler, num.coherence_samples);
    out.Tmin = minimum_cycle(m, out.tau);
    out.p_single = pair_probability(p, idler).p_single;

    if (detail == Detail::full) {
        if (basis.complete)
            out.Ps2 = double_click_complete(p.eta, p, basis.grid, idler, num.exec);
        else
            out.Ps2 = double_click_coefficient(eta_m, heralded_psi2(basis, p, idler, num.exec), idler);
        out.has_double_pair = true;
    }
    return out;
}

struct HeraldingReport {
    double kappa_L = 0.0;
    double Ps1 = 0.0;
    double Ps2 = 0.0;
    double Ps = 0.0;
    double lambda0 = 0.0;
    double H = 0.0;
    double R = 0.0;
    double H_weak = 0.0;
    double R_weak = 0.0;
    double Ds = 0.0;
    double Tmin = 0.0;
    CoherenceTimes tau;
    double p_single = 0.0;
    double single_pair = 0.0;
    double double_pair = 0.0;
    double P = 0.0;
    std::vector<double> heralded_mode;
    std::vector<double> idler_nodes;
    SourceParams source;
    Measurement measurement;
    double window = 0.0;
};

inline void validate_kappa(double kappa_L)
{
    if (!(kappa_L >= 0.0) || kappa_L > kMaxKappaL)
        throw ConfigError("kappa_L = " + std::to_string(kappa_L) + " lies outside [0, " +
                          std::to_string(kMaxKappaL) + "] where the two-pair truncation holds");
}

inline HeraldingReport figures_of_merit(const HeraldingModel& model, double kappa_L)
{
    validate_kappa(kappa_L);
    if (!model.has_double_pair && kappa_L > 0.0)
        throw ConfigError("figures of merit at kappa_L > 0 need the double-pair coefficient");

    HeraldingReport r;
    const double k2 = kappa_L * kappa_L;
    r.kappa_L = kappa_L;
    r.Ps1 = model.Ps1;
    r.Ps2 = model.Ps2;
    r.Ps = k2 * model.Ps1 + k2 * k2 * model.Ps2;
    r.lambda0 = model.lambda0();
    r.H = r.lambda0 * model.Ps1 / (model.Ps1 + k2 * model.Ps2);
    r.Tmin = model.Tmin;
    r.R = r.Ps / model.Tmin;
    r.H_weak = (1.0 - k2 * model.Ps2 / model.Ps1) * r.lambda0;
    r.R_weak = k2 * model.Ps1 / model.Tmin;
    r.tau = model.tau;
    r.p_single = model.p_single;
    r.single_pair = k2 * model.p_single;
    r.double_pair = r.single_pair * r.single_pair;
    r.P = r.single_pair + r.double_pair;
    // kappa_L -> 0 limit of Ps / P
    r.Ds = kappa_L > 0.0 ? r.Ps / r.P : model.Ps1 / model.p_single;
    r.heralded_mode = model.density.mode;
    r.idler_nodes = model.idler_nodes;
    r.source = model.source;
    r.source.kappa_L = kappa_L;
    r.measurement = model.measurement;
    r.window = model.numerics.window;
    return r;
}

} // namespace herald
