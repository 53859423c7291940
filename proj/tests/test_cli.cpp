#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "herald/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "heraldsim");
    std::ostringstream out, err;
    const int code = herald::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    auto d = fs::temp_directory_path() / ("herald_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

fs::path write_config(const fs::path& dir, const std::string& text)
{
    const auto p = dir / "run.cfg";
    std::ofstream(p) << text;
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

} // namespace

TEST(Cli, PresetsList)
{
    const auto r = run({"presets", "list"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(first_line(r.out), "name,mu_s,mu_i,filtering,description");
    EXPECT_NE(r.out.find("state4,-1.33,0.45,band"), std::string::npos);
    EXPECT_NE(r.out.find("state6,25,0,none"), std::string::npos);
}

TEST(Cli, ReportAtZeroKappa)
{
    const auto dir = scratch("report0");
    const auto cfg = write_config(dir, "filter.B = 0.95\nfilter.T = 1.1\nsource.kappa_L = 0\n");
    const auto r = run({"report", "--preset", "state1", "--config", cfg.string(), "--nodes", "48"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["report"]["R"].get<double>(), 0.0);
    EXPECT_EQ(j["report"]["H"].get<double>(), j["report"]["lambda0"].get<double>());
    EXPECT_EQ(j["coherence_time_definition"], "power_equivalent_width");
    EXPECT_EQ(j["manifest"]["preset"], "state1");
    EXPECT_EQ(j["manifest"]["numerics"]["signal_nodes"], 48);
    EXPECT_EQ(j["heralded_mode"]["nu"].size(), 48u);
}

TEST(Cli, ReportWithTargetH)
{
    const auto dir = scratch("report_target");
    const auto cfg = write_config(dir, R"({"preset": "state1", "source": {"target_H": 0.95, "sigma_hz": 1e12},
                                           "filter": {"B": 0.95, "T": 1.1}})");
    const auto r = run({"report", "--config", cfg.string(), "--out", (dir / "o").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "o" / "report.json"));
    EXPECT_NEAR(j["report"]["H"].get<double>(), 0.95, 1e-10);
    EXPECT_NEAR(j["si"]["R_hz"].get<double>(), j["report"]["R"].get<double>() * 1e12, 1e-3);
}

TEST(Cli, KappaChoiceMustBeUnique)
{
    const auto dir = scratch("kappa_both");
    const auto cfg = write_config(dir, "preset = state1\nfilter.B = 0.95\nfilter.T = 1.1\n"
                                       "source.kappa_L = 0.1\nsource.target_H = 0.95\n");
    EXPECT_EQ(run({"report", "--config", cfg.string()}).code, 2);
    const auto none = write_config(dir, "preset = state1\nfilter.B = 0.95\nfilter.T = 1.1\n");
    const auto r = run({"report", "--config", none.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("target_H"), std::string::npos);
}

TEST(Cli, MissingSourceBlockIsConfigError)
{
    const auto dir = scratch("nosource");
    const auto cfg = write_config(dir, "filter.B = 0.95\nfilter.T = 1.1\nsource.kappa_L = 0.1\n");
    const auto r = run({"report", "--config", cfg.string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("source.mu_s"), std::string::npos);
}

TEST(Cli, ParseErrorsAreConfigErrors)
{
    EXPECT_EQ(run({"report", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"report", "--config", "/nonexistent/cfg"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ModesRejectsZeroFilterBeforeComputing)
{
    const auto dir = scratch("modes0");
    const auto cfg = write_config(dir, "filter.B = 0\nfilter.T = 0\n");
    const auto r = run({"modes", "--config", cfg.string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(fs::exists(dir / "o"));
}

TEST(Cli, ModesWritesTransmissionsAndSamples)
{
    const auto dir = scratch("modes");
    const auto cfg = write_config(dir, "filter.B = 1\nfilter.T = 1\n");
    const auto r = run({"modes", "--config", cfg.string(), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto chi = slurp(dir / "modes.csv");
    EXPECT_EQ(first_line(chi), "m,chi_m");
    EXPECT_EQ(chi.substr(chi.find('\n') + 1, 2), "0,");
    EXPECT_EQ(first_line(slurp(dir / "modes_samples.csv")).substr(0, 9), "nu,phi_0,");
    EXPECT_TRUE(fs::exists(dir / "modes.manifest.json"));
}

TEST(Cli, CurveIsDeterministic)
{
    const auto dir = scratch("curve");
    const auto cfg = write_config(dir, "preset = state3\nfilter.B = 0.85\nfilter.T = 1.2\nsource.sigma_hz = 2e12\n");
    const auto a = run({"curve", "--config", cfg.string(), "--out", (dir / "a").string(), "--nodes", "40", "--threads", "1"});
    const auto b = run({"curve", "--config", cfg.string(), "--out", (dir / "b").string(), "--nodes", "40", "--threads", "6"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    const auto ca = slurp(dir / "a" / "curve.csv");
    EXPECT_EQ(ca, slurp(dir / "b" / "curve.csv"));
    EXPECT_EQ(slurp(dir / "a" / "curve.manifest.json"), slurp(dir / "b" / "curve.manifest.json"));
    EXPECT_EQ(first_line(ca), "kappa_L,R_sigma_units,H,R_hz");
    EXPECT_EQ(std::count(ca.begin(), ca.end(), '\n'), 25);
    EXPECT_EQ(ca.find('\r'), std::string::npos);
}

TEST(Cli, CurveJson)
{
    const auto dir = scratch("curve_json");
    const auto cfg = write_config(dir, "preset = state6\n");
    const auto r = run({"curve", "--config", cfg.string(), "--out", dir.string(), "--format", "json", "--nodes", "32"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(dir / "curve.json"));
    EXPECT_EQ(j["measurement"]["mode"], "none");
    EXPECT_EQ(j["points"].size(), 24u);
    EXPECT_EQ(j["manifest"]["conventions"]["unfiltered_detector"], "complete_signal_basis_chi_1");
}

TEST(Cli, SchmidtFooter)
{
    const auto dir = scratch("schmidt");
    const auto r = run({"schmidt", "--preset", "state2", "--out", dir.string(), "--nodes", "64"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto s = slurp(dir / "schmidt.csv");
    EXPECT_EQ(first_line(s), "n,rho_n");
    const auto footer = s.rfind("K,purity\n");
    ASSERT_NE(footer, std::string::npos);
    const auto values = s.substr(footer + 9);
    const double K = std::stod(values.substr(0, values.find(',')));
    EXPECT_GT(K, 1.0);
    EXPECT_LT(K, 1.2);
}

TEST(Cli, ScanBSerialAndParallelIdentical)
{
    const auto dir = scratch("scan");
    const auto cfg = write_config(dir, "preset = state3\nnumerics.b_min = 0.6\nnumerics.b_max = 1.0\n"
                                       "numerics.b_step = 0.2\nnumerics.t_step = 0.2\n");
    const auto a = run({"scan-b", "--config", cfg.string(), "--out", (dir / "a").string(), "--threads", "1"});
    const auto b = run({"scan-b", "--config", cfg.string(), "--out", (dir / "b").string(), "--threads", "8"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    const auto sa = slurp(dir / "a" / "scan_b.csv");
    EXPECT_EQ(sa, slurp(dir / "b" / "scan_b.csv"));
    EXPECT_EQ(first_line(sa), "B,T_star,kappa_L,R0,lambda0,Tmin");
    const auto m = nlohmann::json::parse(slurp(dir / "a" / "scan_b.manifest.json"));
    EXPECT_TRUE(m.contains("best"));
}

TEST(Cli, ScanBRejectsUnfiltered)
{
    EXPECT_EQ(run({"scan-b", "--preset", "state6", "--out", scratch("scan6").string()}).code, 2);
}

TEST(Cli, InfeasibleTargetExitsThree)
{
    const auto dir = scratch("infeasible");
    const auto cfg = write_config(dir, "preset = state1\nfilter.B = 2\nfilter.T = 6\nsource.target_H = 0.999\n");
    const auto r = run({"report", "--config", cfg.string(), "--nodes", "40"});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST(Cli, ModeCapExitsFour)
{
    const auto dir = scratch("mcap");
    const auto cfg = write_config(dir, "filter.B = 4\nfilter.T = 6\nnumerics.m_cap = 4\n");
    EXPECT_EQ(run({"modes", "--config", cfg.string(), "--out", dir.string()}).code, 4);
}
