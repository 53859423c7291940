#pragma once

// CSV/JSON serialization, atomic file output and the reproducibility manifest.

#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "herald/coherence.hpp"
#include "herald/config.hpp"
#include "herald/error.hpp"

namespace herald {

inline constexpr std::string_view kProgramName = "heraldsim";
inline constexpr std::string_view kProgramVersion = "1.0.0";
inline constexpr int kCsvDigits = 9;

/// Shortest general form with 9 significant digits, independent of locale.
inline std::string format_real(double v)
{
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general, kCsvDigits);
    if (ec != std::errc{})
        throw OutputError("number formatting failed");
    return {buf.data(), ptr};
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells)
    {
        if (cells.size() != header_.size())
            throw OutputError("CSV row width does not match the header");
        rows_.push_back(std::move(cells));
    }

    void add_row(std::initializer_list<double> values)
    {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values)
            cells.push_back(format_real(v));
        add_row(std::move(cells));
    }

    void add_row(const std::vector<double>& values)
    {
        std::vector<std::string> cells;
        cells.reserve(values.size());
        for (double v : values)
            cells.push_back(format_real(v));
        add_row(std::move(cells));
    }

    /// Raw trailing line after the table body.
    void add_footer(std::string line) { footer_.push_back(std::move(line)); }

    std::string str() const
    {
        std::string out;
        append_line(out, header_);
        for (const auto& r : rows_)
            append_line(out, r);
        for (const auto& f : footer_)
            out += f + '\n';
        return out;
    }

private:
    static void append_line(std::string& out, const std::vector<std::string>& cells)
    {
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (k)
                out += ',';
            out += cells[k];
        }
        out += '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::string> footer_;
};

/// Writes to a sibling temporary and renames it over the target.
inline void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw OutputError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw OutputError("cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp, ec);
            throw OutputError("write to '" + tmp.string() + "' failed");
        }
    }
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignore;
        std::filesystem::remove(tmp, ignore);
        throw OutputError("cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

/// Everything needed to rerun a command bit-exactly. Thread count is left out
/// on purpose: results do not depend on it.
inline nlohmann::json manifest(const RunConfig& c, std::string_view command)
{
    using nlohmann::json;
    json m;
    m["program"] = kProgramName;
    m["version"] = kProgramVersion;
    m["command"] = command;
    m["preset"] = c.preset;

    json src{{"mu_s", c.source.mu_s}, {"mu_i", c.source.mu_i}, {"eta", c.source.eta}, {"sigma", c.source.sigma}};
    src["sigma_hz"] = c.sigma_hz ? json(*c.sigma_hz) : json(nullptr);
    src["kappa_L"] = c.kappa_L ? json(*c.kappa_L) : json(nullptr);
    src["target_H"] = c.target_H ? json(*c.target_H) : json(nullptr);
    m["source"] = src;

    json filt;
    filt["mode"] = c.filter_mode == FilterMode::none ? "none" : (c.filter_mode == FilterMode::band ? "band" : "unset");
    filt["B"] = c.B ? json(*c.B) : json(nullptr);
    filt["T"] = c.T_auto ? json("auto") : (c.T ? json(*c.T) : json(nullptr));
    m["filter"] = filt;

    const auto& n = c.numerics;
    m["numerics"] = {
        {"signal_nodes", n.signal_nodes},
        {"idler_nodes", n.idler_nodes},
        {"unfiltered_signal_nodes", n.unfiltered_signal_nodes},
        {"schmidt_nodes", c.schmidt_nodes},
        {"window", n.window},
        {"tol", n.tol},
        {"m_cap", n.m_cap},
        {"coherence_samples", n.coherence_samples},
        {"t_grid", {c.optimizer.t_grid.start, c.optimizer.t_grid.stop, c.optimizer.t_grid.step}},
        {"b_grid", {c.optimizer.b_grid.start, c.optimizer.b_grid.stop, c.optimizer.b_grid.step}},
        {"h_floor", c.optimizer.h_floor},
        {"kappa_grid", {{"min", c.kappa_min}, {"max", c.kappa_max}, {"points", c.kappa_points}, {"spacing", "log"}}},
    };
    m["conventions"] = {
        {"units", "sigma"},
        {"window", n.window},
        {"coherence_time", kCoherenceDefinition},
        {"pump_density", "exp(-nu^2/2)"},
        {"truncation", "two_pair"},
        {"unfiltered_detector", "complete_signal_basis_chi_1"},
        {"csv_digits", kCsvDigits},
    };
    return m;
}

} // namespace herald
