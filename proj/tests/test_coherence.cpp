#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "herald/coherence.hpp"

using namespace herald;

TEST(Coherence, PumpGaussianClosedForm)
{
    EXPECT_NEAR(pump_coherence_time(1.0), 1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-9);
}

TEST(Coherence, PumpScalesInverselyWithBandwidth)
{
    EXPECT_NEAR(pump_coherence_time(2.0), 0.5 * pump_coherence_time(1.0), 1e-12);
}

TEST(Coherence, RectangularSpectrumGivesInverseWidth)
{
    for (double B : {0.3, 0.95, 2.0}) {
        const double tau = coherence_time_of([](double) { return 1.0; }, -0.5 * B, 0.5 * B, 1024);
        EXPECT_NEAR(tau, 1.0 / B, 1e-9 / B) << B;
    }
}

TEST(Coherence, EqualsSquaredDensityRatio)
{
    // Discrete Parseval: sum |gamma|^2 dt = sum s^2 / (sum s)^2 / dnu.
    const auto u = UniformSamples::midpoints(-3.0, 3.0, 300);
    std::vector<double> s(u.nodes.size());
    double sum = 0.0, sq = 0.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        s[j] = 1.0 / (1.0 + u.nodes[j] * u.nodes[j]);
        sum += s[j];
        sq += s[j] * s[j];
    }
    EXPECT_NEAR(power_equivalent_width(s, u.step), sq / (sum * sum * u.step), 1e-12);
}

TEST(Coherence, NarrowFilterSignalApproachesRectangle)
{
    SourceParams p;
    const double B = 0.2;
    const auto idler = FreqGrid::symmetric(4.0, 64);
    const double tau = signal_coherence_time(p, -0.5 * B, 0.5 * B, idler);
    EXPECT_NEAR(tau, 1.0 / B, 1e-3 / B);
    EXPECT_GE(tau, (1.0 / B) * (1 - 1e-12));
}

TEST(Coherence, RejectsDegenerateInput)
{
    std::vector<double> zero(16, 0.0);
    EXPECT_THROW(power_equivalent_width(zero, 0.1), NumericalError);
    EXPECT_THROW(power_equivalent_width({}, 0.1), ConfigError);
}
