#pragma once

// Command-line front end: report, curve, scan-b, modes, schmidt, presets list.

#include <algorithm>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "herald/config.hpp"
#include "herald/error.hpp"
#include "herald/heralding.hpp"
#include "herald/optimizer.hpp"
#include "herald/output.hpp"
#include "herald/presets.hpp"
#include "herald/prolate.hpp"
#include "herald/schmidt.hpp"

namespace herald::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kConfig = 2,
    kInfeasible = 3,
    kNumerical = 4,
};

struct Flags {
    std::string config;
    std::string preset;
    std::string out;
    std::string format;
    std::optional<std::size_t> nodes;
    std::optional<double> window;
    std::optional<unsigned> threads;
};

inline RunConfig load(const Flags& f)
{
    RunConfig c;
    if (!f.config.empty())
        apply_config_file(c, f.config, f.preset);
    else if (!f.preset.empty())
        c.apply_preset(find_preset(f.preset));
    if (f.nodes) {
        if (*f.nodes < 2)
            throw ConfigError("--nodes must be at least 2");
        c.numerics.signal_nodes = c.numerics.idler_nodes = c.schmidt_nodes = *f.nodes;
        c.numerics.unfiltered_signal_nodes = 2 * *f.nodes;
    }
    if (f.window)
        c.numerics.window = *f.window;
    if (!f.out.empty())
        c.out_dir = f.out;
    if (!f.format.empty())
        c.format = f.format;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    c.numerics.exec.threads = f.threads ? std::max(1u, *f.threads)
                                        : (c.numerics.exec.threads > 1 ? c.numerics.exec.threads : hw);
    c.numerics.validate();
    return c;
}

struct ResolvedMeasurement {
    Measurement measurement;
    std::optional<GateChoice> gate; ///< set when T was chosen automatically
};

inline ResolvedMeasurement resolve_measurement(const RunConfig& c)
{
    if (c.unfiltered())
        return {Measurement::none(), std::nullopt};
    if (!c.B)
        throw ConfigError("missing field filter.B (or set filter.none = true)");
    if (c.T_auto) {
        FilterParams{*c.B, 1.0}.validate();
        const auto gate = choose_T(*c.B, c.source, c.numerics, c.optimizer, c.numerics.exec);
        return {Measurement::filtered(*c.B, gate.T), gate};
    }
    if (!c.T)
        throw ConfigError("missing field filter.T (a number or auto)");
    const FilterParams f{*c.B, *c.T};
    f.validate();
    return {Measurement{f}, std::nullopt};
}

inline nlohmann::json measurement_json(const Measurement& m)
{
    if (m.unfiltered())
        return {{"mode", "none"}};
    return {{"mode", "band"}, {"B", m.filter->B}, {"T", m.filter->T}, {"c", m.filter->c()}};
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& name)
{
    return std::filesystem::path(c.out_dir) / name;
}

inline void write_table(const RunConfig& c, std::string_view command, const std::string& stem, const CsvTable& table,
                        nlohmann::json extra, std::ostream& out)
{
    auto m = manifest(c, command);
    for (auto it = extra.begin(); it != extra.end(); ++it)
        m[it.key()] = *it;
    const auto csv = out_path(c, stem + ".csv");
    const auto side = out_path(c, stem + ".manifest.json");
    write_atomic(csv, table.str());
    write_atomic(side, m.dump(2) + "\n");
    out << csv.string() << '\n' << side.string() << '\n';
}

inline void write_json(const RunConfig& c, std::string_view command, const std::string& stem, nlohmann::json doc,
                       std::ostream& out)
{
    doc["manifest"] = manifest(c, command);
    const auto path = out_path(c, stem + ".json");
    write_atomic(path, doc.dump(2) + "\n");
    out << path.string() << '\n';
}

inline void require_kappa_choice(const RunConfig& c)
{
    if (c.kappa_L && c.target_H)
        throw ConfigError("give exactly one of source.kappa_L and source.target_H, not both");
    if (!c.kappa_L && !c.target_H)
        throw ConfigError("missing field source.kappa_L or source.target_H");
}

inline int cmd_report(const RunConfig& c, bool write_files, std::ostream& out)
{
    c.require_source();
    require_kappa_choice(c);
    const auto rm = resolve_measurement(c);
    const auto model = analyze(c.source, rm.measurement, c.numerics);
    const double kappa = c.target_H ? valid_kappa_for_target_H(*c.target_H, model) : *c.kappa_L;
    const auto r = figures_of_merit(model, kappa);

    using nlohmann::json;
    json rep{
        {"kappa_L", r.kappa_L}, {"Ps1", r.Ps1}, {"Ps2", r.Ps2}, {"Ps", r.Ps},
        {"lambda0", r.lambda0}, {"H", r.H}, {"R", r.R}, {"H_weak", r.H_weak},
        {"R_weak", r.R_weak}, {"Ds", r.Ds}, {"Tmin", r.Tmin}, {"tau_p", r.tau.pump},
        {"tau_s", r.tau.signal}, {"tau_0", r.tau.heralded}, {"p_single", r.p_single},
        {"single_pair_probability", r.single_pair}, {"double_pair_probability", r.double_pair},
        {"pair_probability", r.P}, {"modes", model.chi.size()},
    };
    json doc;
    doc["report"] = rep;
    doc["measurement"] = measurement_json(rm.measurement);
    if (rm.gate)
        doc["measurement"]["T_auto"] = true;
    doc["source"] = {{"mu_s", r.source.mu_s}, {"mu_i", r.source.mu_i}, {"eta", r.source.eta},
                     {"sigma", r.source.sigma}, {"kappa_L", r.source.kappa_L}};
    doc["window"] = r.window;
    doc["coherence_time_definition"] = kCoherenceDefinition;
    doc["heralded_mode"] = {{"nu", r.idler_nodes}, {"amplitude", r.heralded_mode}};
    if (c.sigma_hz) {
        const double s = *c.sigma_hz;
        doc["si"] = {{"sigma_hz", s}, {"R_hz", r.R * s}, {"Tmin_s", r.Tmin / s},
                     {"tau_p_s", r.tau.pump / s}, {"tau_s_s", r.tau.signal / s}, {"tau_0_s", r.tau.heralded / s}};
        if (!rm.measurement.unfiltered())
            doc["si"].update({{"B_hz", rm.measurement.filter->B * s}, {"T_s", rm.measurement.filter->T / s}});
    }

    if (c.format == "csv") {
        CsvTable t({"field", "value"});
        for (auto it = rep.begin(); it != rep.end(); ++it)
            t.add_row({it.key(), format_real(it->get<double>())});
        if (doc.contains("si"))
            for (auto it = doc["si"].begin(); it != doc["si"].end(); ++it)
                t.add_row({"si." + it.key(), format_real(it->get<double>())});
        CsvTable mode({"nu", "amplitude"});
        for (std::size_t k = 0; k < r.idler_nodes.size(); ++k)
            mode.add_row({r.idler_nodes[k], r.heralded_mode[k]});
        if (write_files) {
            const json extra{{"measurement", doc["measurement"]}};
            write_table(c, "report", "report", t, extra, out);
            write_atomic(out_path(c, "report_mode.csv"), mode.str());
            out << out_path(c, "report_mode.csv").string() << '\n';
        } else {
            out << t.str();
        }
        return kOk;
    }
    doc["manifest"] = manifest(c, "report");
    if (write_files) {
        const auto path = out_path(c, "report.json");
        write_atomic(path, doc.dump(2) + "\n");
        out << path.string() << '\n';
    } else {
        out << doc.dump(2) << '\n';
    }
    return kOk;
}

inline int cmd_curve(const RunConfig& c, std::ostream& out)
{
    c.require_source();
    const auto rm = resolve_measurement(c);
    const auto model = analyze(c.source, rm.measurement, c.numerics);
    const auto curve = tradeoff_curve(model, c.kappa_grid());
    nlohmann::json extra{{"measurement", measurement_json(rm.measurement)}, {"lambda0", curve.lambda0},
                         {"Tmin", model.Tmin}};
    if (c.format == "json") {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : curve.points)
            pts.push_back({{"kappa_L", p.kappa_L}, {"R_sigma_units", p.R}, {"H", p.H}});
        extra["points"] = pts;
        write_json(c, "curve", "curve", extra, out);
        return kOk;
    }
    std::vector<std::string> header{"kappa_L", "R_sigma_units", "H"};
    if (c.sigma_hz)
        header.push_back("R_hz");
    CsvTable t(header);
    for (const auto& p : curve.points) {
        std::vector<double> row{p.kappa_L, p.R, p.H};
        if (c.sigma_hz)
            row.push_back(p.R * *c.sigma_hz);
        t.add_row(row);
    }
    write_table(c, "curve", "curve", t, extra, out);
    return kOk;
}

inline int cmd_scan_b(const RunConfig& c, std::ostream& out)
{
    c.require_source();
    if (c.unfiltered())
        throw ConfigError("scan-b needs a filtered measurement (unset filter.none)");
    OptimizerOptions opt = c.optimizer;
    if (c.target_H)
        opt.target_H = *c.target_H;
    const auto scan = scan_B(c.source, c.numerics, opt, c.numerics.exec);

    nlohmann::json infeasible = nlohmann::json::array();
    for (const auto& e : scan.entries)
        if (!e.feasible)
            infeasible.push_back({{"B", e.B}, {"reason", e.reason}});
    nlohmann::json extra{{"target_H", opt.target_H}, {"infeasible", infeasible}};
    if (scan.best) {
        const auto& b = scan.best_entry();
        extra["best"] = {{"B", b.B}, {"T_star", b.T_star}, {"kappa_L", b.kappa_L}, {"R0", b.R0},
                         {"lambda0", b.lambda0}, {"Tmin", b.Tmin}, {"Ps", b.Ps}};
    }

    if (c.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : scan.entries)
            if (e.feasible)
                rows.push_back({{"B", e.B}, {"T_star", e.T_star}, {"kappa_L", e.kappa_L}, {"R0", e.R0},
                                {"lambda0", e.lambda0}, {"Tmin", e.Tmin}});
        extra["entries"] = rows;
        write_json(c, "scan-b", "scan_b", extra, out);
    } else {
        std::vector<std::string> header{"B", "T_star", "kappa_L", "R0", "lambda0", "Tmin"};
        if (c.sigma_hz)
            header.insert(header.end(), {"B_hz", "T_star_s", "R0_hz", "Tmin_s"});
        CsvTable t(header);
        for (const auto& e : scan.entries) {
            if (!e.feasible)
                continue;
            std::vector<double> row{e.B, e.T_star, e.kappa_L, e.R0, e.lambda0, e.Tmin};
            if (c.sigma_hz) {
                const double s = *c.sigma_hz;
                row.insert(row.end(), {e.B * s, e.T_star / s, e.R0 * s, e.Tmin / s});
            }
            t.add_row(row);
        }
        write_table(c, "scan-b", "scan_b", t, extra, out);
    }
    if (!scan.best)
        throw InfeasibleError("no bandwidth on the grid meets the constraints");
    return kOk;
}

inline int cmd_modes(const RunConfig& c, std::ostream& out)
{
    if (c.unfiltered())
        throw ConfigError("modes needs a filter (filter.B and filter.T)");
    if (!c.B)
        throw ConfigError("missing field filter.B");
    if (!c.T)
        throw ConfigError("missing field filter.T (modes needs a numeric gate width)");
    const FilterParams f{*c.B, *c.T};
    f.validate();
    const auto basis = build_basis(f, c.numerics.basis_options());

    CsvTable chi({"m", "chi_m"});
    for (std::size_t m = 0; m < basis.size(); ++m)
        chi.add_row({static_cast<double>(m), basis.chi[m]});
    std::vector<std::string> header{"nu"};
    for (std::size_t m = 0; m < basis.size(); ++m)
        header.push_back("phi_" + std::to_string(m));
    CsvTable samples(header);
    for (std::size_t k = 0; k < basis.grid.size(); ++k) {
        std::vector<double> row{basis.grid.nodes[k]};
        for (std::size_t m = 0; m < basis.size(); ++m)
            row.push_back(basis.modes(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m)));
        samples.add_row(row);
    }
    const nlohmann::json extra{{"c", f.c()}, {"modes", basis.size()}, {"samples_on", "gauss_legendre_nodes"}};
    write_table(c, "modes", "modes", chi, extra, out);
    write_atomic(out_path(c, "modes_samples.csv"), samples.str());
    out << out_path(c, "modes_samples.csv").string() << '\n';
    return kOk;
}

inline int cmd_schmidt(const RunConfig& c, std::ostream& out)
{
    c.require_source();
    const auto s = schmidt_decompose(c.source, c.numerics.window, c.schmidt_nodes);
    CsvTable t({"n", "rho_n"});
    for (std::size_t n = 0; n < s.weights.size(); ++n)
        t.add_row({static_cast<double>(n), s.weights[n]});
    t.add_footer("K,purity");
    t.add_footer(format_real(s.K) + "," + format_real(s.purity()));
    const nlohmann::json extra{{"K", s.K}, {"purity", s.purity()}, {"window", c.numerics.window}};
    write_table(c, "schmidt", "schmidt", t, extra, out);
    return kOk;
}

inline int cmd_presets_list(const RunConfig& c, std::ostream& out)
{
    if (c.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : kPresets)
            arr.push_back({{"name", p.name}, {"mu_s", p.mu_s}, {"mu_i", p.mu_i},
                           {"filtering", p.unfiltered ? "none" : "band"}, {"description", p.description}});
        out << arr.dump(2) << '\n';
        return kOk;
    }
    CsvTable t({"name", "mu_s", "mu_i", "filtering", "description"});
    for (const auto& p : kPresets)
        t.add_row({std::string(p.name), format_real(p.mu_s), format_real(p.mu_i),
                   p.unfiltered ? "none" : "band", std::string(p.description)});
    out << t.str();
    return kOk;
}

/// Runs the tool with argv-style arguments (args[0] is the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Heralded single-photon source simulator", std::string(kProgramName)};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--config", f.config, "key=value or JSON configuration file");
    app.add_option("--preset", f.preset, "named source preset (state1..state6)");
    app.add_option("--out", f.out, "output directory");
    app.add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--nodes", f.nodes, "quadrature nodes per axis");
    app.add_option("--window", f.window, "frequency truncation half-width W (units of sigma)");
    app.add_option("--threads", f.threads, "worker threads (results do not depend on it)");
    app.fallthrough();

    auto* report = app.add_subcommand("report", "figures of merit at one operating point");
    auto* curve = app.add_subcommand("curve", "H versus R over a kappa_L grid");
    auto* scan = app.add_subcommand("scan-b", "bandwidth scan with optimized gate and pump");
    auto* modes = app.add_subcommand("modes", "prolate transmissions and mode samples");
    auto* schmidt = app.add_subcommand("schmidt", "Schmidt spectrum of the pair amplitude");
    auto* presets = app.add_subcommand("presets", "named sources");
    auto* list = presets->add_subcommand("list", "print the preset table");
    presets->require_subcommand(1);
    for (auto* s : {report, curve, scan, modes, schmidt, presets, list})
        s->fallthrough();

    std::vector<std::string> rev(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rev.begin(), rev.end());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kConfig;
    }

    try {
        const auto c = load(f);
        if (*report)
            return cmd_report(c, !f.out.empty(), out);
        if (*curve)
            return cmd_curve(c, out);
        if (*scan)
            return cmd_scan_b(c, out);
        if (*modes)
            return cmd_modes(c, out);
        if (*schmidt)
            return cmd_schmidt(c, out);
        if (*list)
            return cmd_presets_list(c, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const OutputError& e) {
        err << "output error: " << e.what() << '\n';
        return kConfig;
    } catch (const InfeasibleError& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUnexpected;
    }
    return kUnexpected;
}

} // namespace herald::cli
