#pragma once

// Run configuration: flat key=value text with dotted section prefixes
// ("source.mu_s = 10"), or the same keys as a nested JSON object.

#include <charconv>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "herald/error.hpp"
#include "herald/heralding.hpp"
#include "herald/optimizer.hpp"
#include "herald/presets.hpp"

namespace herald {

enum class FilterMode { unset, band, none };

struct RunConfig {
    std::string preset;
    SourceParams source;
    bool has_mu_s = false;
    bool has_mu_i = false;
    std::optional<double> sigma_hz; ///< pump bandwidth in Hz, enables SI columns
    std::optional<double> kappa_L;
    std::optional<double> target_H;

    FilterMode filter_mode = FilterMode::unset;
    std::optional<double> B;
    std::optional<double> T;
    bool T_auto = false;

    Numerics numerics;
    std::size_t schmidt_nodes = 128;
    OptimizerOptions optimizer;
    double kappa_min = 0.02;
    double kappa_max = 0.5;
    std::size_t kappa_points = 24;

    std::string out_dir = "out";
    std::string format; ///< empty: the subcommand's default

    void apply_preset(const Preset& p)
    {
        preset = std::string(p.name);
        source.mu_s = p.mu_s;
        source.mu_i = p.mu_i;
        has_mu_s = has_mu_i = true;
        if (filter_mode == FilterMode::unset && p.unfiltered)
            filter_mode = FilterMode::none;
    }

    /// Source parameters are mandatory unless a preset supplies them.
    void require_source() const
    {
        if (!has_mu_s && !has_mu_i)
            throw ConfigError("missing source block: field source.mu_s is required (or give --preset)");
        if (!has_mu_s)
            throw ConfigError("missing field source.mu_s");
        if (!has_mu_i)
            throw ConfigError("missing field source.mu_i");
    }

    bool unfiltered() const { return filter_mode == FilterMode::none; }

    std::vector<double> kappa_grid() const { return log_kappa_grid(kappa_min, kappa_max, kappa_points); }
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_real(std::string_view v, const std::string& where)
{
    double out = 0.0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end || v.empty())
        throw ConfigError(where + ": expected a number, got '" + std::string(v) + "'");
    return out;
}

inline std::size_t parse_count(std::string_view v, const std::string& where)
{
    std::size_t out = 0;
    const auto* end = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || ptr != end || v.empty())
        throw ConfigError(where + ": expected a non-negative integer, got '" + std::string(v) + "'");
    return out;
}

inline bool parse_flag(std::string_view v, const std::string& where)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw ConfigError(where + ": expected true or false, got '" + std::string(v) + "'");
}

struct ConfigEntry {
    std::string key;
    std::string value;
    std::string where; ///< "line 3" or "field source.mu_s"
};

inline void apply_entry(RunConfig& c, const ConfigEntry& e)
{
    const auto& k = e.key;
    const std::string_view v = e.value;
    const std::string at = e.where + ": " + k;
    auto real = [&] { return parse_real(v, at); };
    auto count = [&] { return parse_count(v, at); };

    if (k == "preset")
        c.apply_preset(find_preset(v));
    else if (k == "source.mu_s") {
        c.source.mu_s = real();
        c.has_mu_s = true;
    } else if (k == "source.mu_i") {
        c.source.mu_i = real();
        c.has_mu_i = true;
    } else if (k == "source.eta")
        c.source.eta = real();
    else if (k == "source.sigma_hz") {
        c.sigma_hz = real();
        if (!(*c.sigma_hz > 0.0))
            throw ConfigError(at + ": must be positive");
    } else if (k == "source.kappa_L")
        c.kappa_L = real();
    else if (k == "source.target_H")
        c.target_H = real();
    else if (k == "filter.B") {
        c.B = real();
        c.filter_mode = FilterMode::band;
    } else if (k == "filter.T") {
        if (v == "auto") {
            c.T_auto = true;
            c.T.reset();
        } else {
            c.T = real();
            c.T_auto = false;
        }
        c.filter_mode = FilterMode::band;
    } else if (k == "filter.none")
        c.filter_mode = parse_flag(v, at) ? FilterMode::none : FilterMode::band;
    else if (k == "numerics.signal_nodes")
        c.numerics.signal_nodes = count();
    else if (k == "numerics.idler_nodes")
        c.numerics.idler_nodes = count();
    else if (k == "numerics.unfiltered_signal_nodes")
        c.numerics.unfiltered_signal_nodes = count();
    else if (k == "numerics.schmidt_nodes")
        c.schmidt_nodes = count();
    else if (k == "numerics.window")
        c.numerics.window = real();
    else if (k == "numerics.tol")
        c.numerics.tol = real();
    else if (k == "numerics.m_cap")
        c.numerics.m_cap = count();
    else if (k == "numerics.coherence_samples")
        c.numerics.coherence_samples = count();
    else if (k == "numerics.threads")
        c.numerics.exec.threads = static_cast<unsigned>(count());
    else if (k == "numerics.t_min")
        c.optimizer.t_grid.start = real();
    else if (k == "numerics.t_max")
        c.optimizer.t_grid.stop = real();
    else if (k == "numerics.t_step")
        c.optimizer.t_grid.step = real();
    else if (k == "numerics.b_min")
        c.optimizer.b_grid.start = real();
    else if (k == "numerics.b_max")
        c.optimizer.b_grid.stop = real();
    else if (k == "numerics.b_step")
        c.optimizer.b_grid.step = real();
    else if (k == "numerics.h_floor")
        c.optimizer.h_floor = real();
    else if (k == "numerics.kappa_min")
        c.kappa_min = real();
    else if (k == "numerics.kappa_max")
        c.kappa_max = real();
    else if (k == "numerics.kappa_points")
        c.kappa_points = count();
    else if (k == "output.dir")
        c.out_dir = std::string(v);
    else if (k == "output.format") {
        if (v != "csv" && v != "json")
            throw ConfigError(at + ": expected csv or json, got '" + std::string(v) + "'");
        c.format = std::string(v);
    } else
        throw ConfigError(e.where + ": unknown key '" + k + "'");
}

inline std::vector<ConfigEntry> read_key_value(std::string_view text)
{
    std::vector<ConfigEntry> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no);
        if (eq == std::string_view::npos)
            throw ConfigError(where + ": expected key = value, got '" + std::string(line) + "'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError(where + ": empty key");
        out.push_back({std::string(key), std::string(value), where});
    }
    return out;
}

inline void flatten_json(const nlohmann::json& j, const std::string& prefix, std::vector<ConfigEntry>& out)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string key = prefix.empty() ? it.key() : prefix + "." + it.key();
        const auto& v = *it;
        if (v.is_object())
            flatten_json(v, key, out);
        else if (v.is_string())
            out.push_back({key, v.get<std::string>(), "field " + key});
        else if (v.is_boolean())
            out.push_back({key, v.get<bool>() ? "true" : "false", "field " + key});
        else if (v.is_number())
            out.push_back({key, v.dump(), "field " + key});
        else
            throw ConfigError("field " + key + ": unsupported value " + v.dump());
    }
}

inline std::vector<ConfigEntry> read_json(std::string_view text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("JSON config: ") + e.what());
    }
    if (!j.is_object())
        throw ConfigError("JSON config: top level must be an object");
    std::vector<ConfigEntry> out;
    flatten_json(j, "", out);
    return out;
}

} // namespace detail

/// Applies a configuration document to c. The preset (preset_override if
/// given, else the one named in the document) goes first so that explicit
/// keys override it.
inline void apply_config_text(RunConfig& c, std::string_view text, const std::string& preset_override = {})
{
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool is_json = first != std::string_view::npos && text[first] == '{';
    const auto entries = is_json ? detail::read_json(text) : detail::read_key_value(text);
    if (!preset_override.empty())
        c.apply_preset(find_preset(preset_override));
    else
        for (const auto& e : entries)
            if (e.key == "preset")
                detail::apply_entry(c, e);
    for (const auto& e : entries)
        if (e.key != "preset")
            detail::apply_entry(c, e);
}

inline void apply_config_file(RunConfig& c, const std::string& path, const std::string& preset_override = {})
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        apply_config_text(c, ss.str(), preset_override);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace herald
