#include <string>

#include <gtest/gtest.h>

#include "herald/config.hpp"

using namespace herald;

namespace {

std::string message_of(const std::string& text)
{
    RunConfig c;
    try {
        apply_config_text(c, text);
        c.require_source();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, KeyValueWithSectionsAndComments)
{
    RunConfig c;
    apply_config_text(c, "# state 2\nsource.mu_s = 10\nsource.mu_i=0   # no idler delay\n\n"
                         "source.eta = 0.2\nfilter.B = 0.6\nfilter.T = auto\nnumerics.idler_nodes = 48\n");
    EXPECT_EQ(c.source.mu_s, 10.0);
    EXPECT_EQ(c.source.mu_i, 0.0);
    EXPECT_EQ(c.source.eta, 0.2);
    EXPECT_EQ(*c.B, 0.6);
    EXPECT_TRUE(c.T_auto);
    EXPECT_EQ(c.numerics.idler_nodes, 48u);
    EXPECT_EQ(c.filter_mode, FilterMode::band);
    EXPECT_NO_THROW(c.require_source());
}

TEST(Config, JsonIsEquivalent)
{
    RunConfig a, b;
    apply_config_text(a, "source.mu_s = -1.33\nsource.mu_i = 0.45\nfilter.B = 0.85\nfilter.T = 1.2\nsource.target_H = 0.95\n");
    apply_config_text(b, R"({"source": {"mu_s": -1.33, "mu_i": 0.45, "target_H": 0.95},
                             "filter": {"B": 0.85, "T": 1.2}})");
    EXPECT_EQ(a.source.mu_s, b.source.mu_s);
    EXPECT_EQ(a.source.mu_i, b.source.mu_i);
    EXPECT_EQ(*a.B, *b.B);
    EXPECT_EQ(*a.T, *b.T);
    EXPECT_EQ(*a.target_H, *b.target_H);
}

TEST(Config, DefaultsMatchModules)
{
    RunConfig c;
    const Numerics n;
    EXPECT_EQ(c.numerics.signal_nodes, n.signal_nodes);
    EXPECT_EQ(c.numerics.window, n.window);
    EXPECT_EQ(c.numerics.tol, n.tol);
    EXPECT_EQ(c.numerics.m_cap, n.m_cap);
    EXPECT_EQ(c.kappa_grid(), log_kappa_grid());
    EXPECT_EQ(c.optimizer.t_grid.step, 0.1);
    EXPECT_EQ(c.optimizer.b_grid.step, 0.05);
}

TEST(Config, PresetThenOverrides)
{
    RunConfig c;
    apply_config_text(c, "source.mu_i = 0.5\npreset = state2\n");
    EXPECT_EQ(c.preset, "state2");
    EXPECT_EQ(c.source.mu_s, 10.0);
    EXPECT_EQ(c.source.mu_i, 0.5);

    RunConfig d;
    apply_config_text(d, "preset = state2\n", "state6");
    EXPECT_EQ(d.source.mu_s, 25.0);
    EXPECT_TRUE(d.unfiltered());
}

TEST(Config, DiagnosticsNameLineAndField)
{
    EXPECT_NE(message_of("source.mu_s = 1\nsource.mu_x = 3\n").find("line 2"), std::string::npos);
    EXPECT_NE(message_of("source.mu_s = 1\nsource.mu_x = 3\n").find("source.mu_x"), std::string::npos);
    EXPECT_NE(message_of("source.mu_s = ten\n").find("source.mu_s"), std::string::npos);
    EXPECT_NE(message_of("just words\n").find("line 1"), std::string::npos);
    EXPECT_NE(message_of(R"({"source": {"mu_s": "x"}})").find("field source.mu_s"), std::string::npos);
    EXPECT_NE(message_of("{ broken").find("JSON"), std::string::npos);
    EXPECT_NE(message_of("output.format = xml\n").find("output.format"), std::string::npos);
}

TEST(Config, MissingSourceBlockNamesField)
{
    const auto msg = message_of("filter.B = 0.95\nfilter.T = 1.1\n");
    EXPECT_NE(msg.find("source.mu_s"), std::string::npos);
    EXPECT_NE(message_of("source.mu_s = 1\n").find("source.mu_i"), std::string::npos);
}

TEST(Config, UnknownPreset)
{
    RunConfig c;
    EXPECT_THROW(apply_config_text(c, "preset = state9\n"), ConfigError);
    EXPECT_THROW(find_preset("nope"), ConfigError);
}

TEST(Presets, EncodeTheSixStates)
{
    ASSERT_EQ(kPresets.size(), 6u);
    const double mu[6][2] = {{0, 0}, {10, 0}, {2.6, 0}, {-1.33, 0.45}, {-1.3, 1.3}, {25, 0}};
    for (std::size_t k = 0; k < 6; ++k) {
        EXPECT_EQ(kPresets[k].mu_s, mu[k][0]);
        EXPECT_EQ(kPresets[k].mu_i, mu[k][1]);
        EXPECT_EQ(kPresets[k].unfiltered, k == 5);
        EXPECT_EQ(kPresets[k].name, "state" + std::to_string(k + 1));
    }
}
