#pragma once

// Two-stage filter optimization: for each bandwidth choose the gate that
// maximizes the weak-pump rate under a purity floor, then set the pump so the
// full heralding efficiency meets a target.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "herald/error.hpp"
#include "herald/heralding.hpp"
#include "herald/parallel.hpp"

namespace herald {

/// Inclusive arithmetic grid built from an integer index so endpoints are exact.
struct LinearGrid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> values() const
    {
        if (!(step > 0.0) || stop < start)
            throw ConfigError("grid needs step > 0 and stop >= start");
        const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
        std::vector<double> out(n);
        for (std::size_t k = 0; k < n; ++k)
            out[k] = start + static_cast<double>(k) * step;
        return out;
    }
};

struct OptimizerOptions {
    LinearGrid t_grid{0.2, 6.0, 0.1};
    LinearGrid b_grid{0.2, 2.0, 0.05};
    double h_floor = 0.99;
    double target_H = 0.95;
};

/// n log-spaced values in [lo, hi], ascending.
inline std::vector<double> log_kappa_grid(double lo = 0.02, double hi = 0.5, std::size_t n = 24)
{
    if (!(lo > 0.0) || !(hi > lo) || n < 2)
        throw ConfigError("kappa grid needs 0 < lo < hi and at least two points");
    std::vector<double> out(n);
    const double a = std::log(lo);
    const double b = std::log(hi);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Weak-pump quantities at fixed bandwidth, reusing the T-independent
/// pump and signal coherence times across gate widths.
class WeakPumpEvaluator {
public:
    struct Point {
        double T = 0.0;
        double lambda0 = 0.0;
        double Ps1 = 0.0;
        double Tmin = 0.0;
        double rate() const { return Ps1 / Tmin; } ///< R_w / (kappa L)^2
    };

    WeakPumpEvaluator(const SourceParams& p, double B, const Numerics& num)
        : source_(p), B_(B), numerics_(num), idler_(num.idler_grid())
    {
        p.validate();
        num.validate();
        FilterParams{B, 1.0}.validate();
        pump_tau_ = pump_coherence_time(p.sigma, num.coherence_samples);
        signal_tau_ = signal_coherence_time(p, -0.5 * B, 0.5 * B, idler_, num.coherence_samples);
    }

    Point operator()(double T) const
    {
        const FilterParams f{B_, T};
        const auto basis = build_basis(f, numerics_.basis_options());
        const auto eta_m = detection_efficiencies(basis, source_.eta);
        const auto psi1 = heralded_psi1(basis, source_, idler_);
        const auto dens = heralded_density_matrix(eta_m, psi1, idler_);
        const HeraldedMode mode(basis, source_, eta_m, psi1, idler_, dens);
        const double tau0 = coherence_time_of(
            [&](double nu) {
                const double v = mode(nu);
                return v * v;
            },
            idler_.lo, idler_.hi, numerics_.coherence_samples);
        Point pt;
        pt.T = T;
        pt.lambda0 = dens.lambda0();
        pt.Ps1 = single_click_coefficient(eta_m, psi1, idler_);
        pt.Tmin = minimum_cycle(Measurement::filtered(B_, T), {pump_tau_, signal_tau_, tau0});
        return pt;
    }

private:
    SourceParams source_;
    double B_;
    Numerics numerics_;
    FreqGrid idler_;
    double pump_tau_ = 0.0;
    double signal_tau_ = 0.0;
};

struct GateChoice {
    double T = 0.0;
    double lambda0 = 0.0;
    double Ps1 = 0.0;
    double Tmin = 0.0;
    double rate() const { return Ps1 / Tmin; }
};

/// Gate width on the grid that maximizes Ps1 / T_min subject to lambda0 >= h_floor.
/// Ties go to the smaller T.
inline GateChoice choose_T(double B, const SourceParams& p, const Numerics& num, const OptimizerOptions& opt = {},
                           const Exec& exec = {})
{
    const WeakPumpEvaluator eval(p, B, num);
    const auto ts = opt.t_grid.values();
    std::vector<WeakPumpEvaluator::Point> pts(ts.size());
    parallel_for(ts.size(), exec, [&](std::size_t k) { pts[k] = eval(ts[k]); });

    std::optional<GateChoice> best;
    for (const auto& pt : pts) {
        if (pt.lambda0 < opt.h_floor)
            continue;
        if (!best || pt.rate() > best->rate())
            best = GateChoice{pt.T, pt.lambda0, pt.Ps1, pt.Tmin};
    }
    if (!best)
        throw InfeasibleError("no gate width reaches lambda0 >= " + std::to_string(opt.h_floor) +
                              " at B = " + std::to_string(B));
    return *best;
}

/// kappa L that puts the full heralding efficiency exactly at target_H.
inline double kappa_for_target_H(double target_H, const HeraldingModel& model)
{
    if (!model.has_double_pair)
        throw ConfigError("kappa_for_target_H needs the double-pair coefficient");
    const double lambda0 = model.lambda0();
    if (!(target_H > 0.0) || target_H >= lambda0)
        throw InfeasibleError("target H = " + std::to_string(target_H) + " is not below lambda0 = " +
                              std::to_string(lambda0));
    if (!(model.Ps2 > 0.0))
        throw NumericalError("double-pair coefficient vanishes");
    return std::sqrt((lambda0 / target_H - 1.0) * model.Ps1 / model.Ps2);
}

/// As kappa_for_target_H, but infeasible when the root leaves the two-pair regime.
inline double valid_kappa_for_target_H(double target_H, const HeraldingModel& model)
{
    const double kappa = kappa_for_target_H(target_H, model);
    if (kappa > kMaxKappaL)
        throw InfeasibleError("target H = " + std::to_string(target_H) + " needs kappa_L = " +
                              std::to_string(kappa) + " beyond the two-pair validity limit");
    return kappa;
}

struct TradeoffPoint {
    double kappa_L = 0.0;
    double R = 0.0;
    double H = 0.0;
};

struct TradeoffCurve {
    std::vector<TradeoffPoint> points; ///< ascending kappa_L
    SourceParams source;
    Measurement measurement;
    double window = 0.0;
    double lambda0 = 0.0;
};

inline TradeoffCurve tradeoff_curve(const HeraldingModel& model, std::vector<double> kappa_grid)
{
    std::sort(kappa_grid.begin(), kappa_grid.end());
    TradeoffCurve c;
    c.source = model.source;
    c.measurement = model.measurement;
    c.window = model.numerics.window;
    c.lambda0 = model.lambda0();
    for (double k : kappa_grid) {
        if (!(k > 0.0))
            throw ConfigError("kappa grid values must be positive");
        const auto r = figures_of_merit(model, k);
        c.points.push_back({k, r.R, r.H});
    }
    return c;
}

inline TradeoffCurve tradeoff_curve(const SourceParams& p, const Measurement& m, const Numerics& num,
                                    const std::vector<double>& kappa_grid)
{
    return tradeoff_curve(analyze(p, m, num), kappa_grid);
}

/// Rate of a curve at heralding efficiency h, in closed form; empty when the
/// curve never reaches h.
inline std::optional<double> rate_at_efficiency(const HeraldingModel& model, double h)
{
    if (h >= model.lambda0())
        return std::nullopt;
    const double k2 = (model.lambda0() / h - 1.0) * model.Ps1 / model.Ps2;
    if (k2 > kMaxKappaL * kMaxKappaL)
        return std::nullopt;
    return (k2 * model.Ps1 + k2 * k2 * model.Ps2) / model.Tmin;
}

struct ScanEntry {
    double B = 0.0;
    bool feasible = false;
    std::string reason; ///< why the entry is infeasible
    double T_star = 0.0;
    double kappa_L = 0.0;
    double R0 = 0.0;
    double H = 0.0;
    double Ps = 0.0;
    double lambda0 = 0.0;
    double Tmin = 0.0;
};

struct ScanResult {
    std::vector<ScanEntry> entries; ///< ascending B
    std::optional<std::size_t> best;
    const ScanEntry& best_entry() const
    {
        if (!best)
            throw InfeasibleError("no bandwidth in the scan is feasible");
        return entries[*best];
    }
};

inline ScanEntry optimize_bandwidth(double B, const SourceParams& p, const Numerics& num,
                                    const OptimizerOptions& opt)
{
    ScanEntry e;
    e.B = B;
    try {
        const auto gate = choose_T(B, p, num, opt);
        e.T_star = gate.T;
        const auto model = analyze(p, Measurement::filtered(B, gate.T), num);
        e.kappa_L = valid_kappa_for_target_H(opt.target_H, model);
        const auto r = figures_of_merit(model, e.kappa_L);
        e.R0 = r.R;
        e.H = r.H;
        e.Ps = r.Ps;
        e.lambda0 = r.lambda0;
        e.Tmin = r.Tmin;
        e.feasible = true;
    } catch (const InfeasibleError& ex) {
        e.feasible = false;
        e.reason = ex.what();
    }
    return e;
}

/// Bandwidth scan. Entries are computed independently and assembled by grid index.
inline ScanResult scan_B(const SourceParams& p, const Numerics& num, const OptimizerOptions& opt = {},
                         const Exec& exec = {})
{
    const auto bs = opt.b_grid.values();
    ScanResult out;
    out.entries.resize(bs.size());
    Numerics inner = num;
    inner.exec = Exec{1};
    parallel_for(bs.size(), exec, [&](std::size_t k) { out.entries[k] = optimize_bandwidth(bs[k], p, inner, opt); });
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
        const auto& e = out.entries[k];
        if (e.feasible && (!out.best || e.R0 > out.entries[*out.best].R0))
            out.best = k;
    }
    return out;
}

/// Bare detector: the complete signal basis with every mode transmitted.
inline HeraldingModel unfiltered_model(const SourceParams& p, const Numerics& num)
{
    return analyze(p, Measurement::none(), num);
}

inline TradeoffCurve unfiltered_reference(const SourceParams& p, const Numerics& num,
                                          const std::vector<double>& kappa_grid = log_kappa_grid())
{
    return tradeoff_curve(unfiltered_model(p, num), kappa_grid);
}

} // namespace herald
