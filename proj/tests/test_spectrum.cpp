#include <gtest/gtest.h>

#include "cascade/spectrum.hpp"

using namespace cascade;

namespace {

Eigen::MatrixXcd toeplitz_coherences(const std::vector<double>& c)
{
    const int g = static_cast<int>(c.size()) + 1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(g, g) / static_cast<double>(g);
    for (int a = 0; a < g; ++a)
        for (int b = a + 1; b < g; ++b) {
            m(b, a) = std::complex<double>(c[b - a - 1], 0.5 * c[b - a - 1]);
            m(a, b) = std::conj(m(b, a));
        }
    return m;
}

} // namespace

TEST(Peaks, WeightsAndContributors)
{
    const auto m = toeplitz_coherences({0.1, 0.01, 0.001});
    const auto ps = coherence_peaks(m, 2.0);
    ASSERT_EQ(ps.size(), 3u);
    EXPECT_DOUBLE_EQ(ps.harmonic(2).frequency, 4.0);
    EXPECT_EQ(ps.harmonic(1).contributors.size(), 3u);
    EXPECT_EQ(ps.harmonic(3).contributors.size(), 1u);
    EXPECT_EQ(ps.harmonic(2).contributors[1].l, 3);
    EXPECT_NEAR(ps.harmonic(1).weight, 3 * 1.25 * 0.01, 1e-15);
    EXPECT_NEAR(ps.harmonic(3).weight, 1.25 * 1e-6, 1e-18);
    EXPECT_THROW(coherence_peaks(Eigen::MatrixXcd::Identity(1, 1), 1.0), ConfigError);
}

TEST(Peaks, HeightRatios)
{
    const auto ps = coherence_peaks(toeplitz_coherences({0.1, 0.01, 0.001}), 1.0);
    const auto h = height_ratios(ps);
    EXPECT_DOUBLE_EQ(h(1), 1.0);
    EXPECT_NEAR(h(2), 2.0 * 1e-4 / (3.0 * 1e-2), 1e-15);
    EXPECT_NEAR(h(3), 1e-6 / (3.0 * 1e-2), 1e-16);
    const auto zero = coherence_peaks(Eigen::MatrixXcd::Identity(3, 3) / 3.0, 1.0);
    EXPECT_THROW(height_ratios(zero), SolverError);
}

TEST(Fit, ExactGeometricSeries)
{
    HeightRatios h{2.0, {0.1, 0.01, 0.001, 1e-4}};
    const auto f = loglinear_fit(h);
    EXPECT_NEAR(f.slope, std::log(0.1), 1e-12);
    EXPECT_NEAR(f.intercept, std::log(2.0) - std::log(0.1), 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_THROW(loglinear_fit(HeightRatios{1.0, {0.1}}), SolverError);
}

TEST(Visible, CountsAboveThreshold)
{
    PeakSet ps;
    ps.delta_omega_s = 1.0;
    for (double w : {1.0, 1e-2, 1e-4, 2e-5, 1e-6, 1e-9})
        ps.peaks.push_back({static_cast<int>(ps.peaks.size()) + 1, 0.0, w, {}});
    EXPECT_EQ(visible_peaks(ps, 1e-5), 4);
    EXPECT_EQ(visible_peaks(ps, 0.0), 6);
    ps.peaks.front().weight = 0.0;
    EXPECT_EQ(visible_peaks(ps, 1e-5), 0);
}

TEST(Broadening, AreaAndPeakValue)
{
    PeakSet ps;
    ps.delta_omega_s = 10.0;
    ps.peaks.push_back({1, 10.0, 2.0, {}});
    ps.peaks.push_back({2, 20.0, 0.5, {}});
    std::vector<double> grid;
    const double lo = -4000.0, hi = 4000.0, step = 0.01;
    for (double x = lo; x <= hi; x += step)
        grid.push_back(x);
    const auto s = broadened_spectrum(ps, 0.2, grid);
    double area = 0.0;
    for (double v : s)
        area += v * step;
    EXPECT_NEAR(area, 2.5, 1e-3);
    const std::vector<double> centre{10.0};
    EXPECT_NEAR(broadened_spectrum(ps, 0.2, centre)[0], 2.0 / (std::numbers::pi * 0.1), 1e-3);
    EXPECT_THROW(broadened_spectrum(ps, 0.0, centre), ConfigError);
    EXPECT_THROW(broadened_spectrum(ps, 1.0, std::vector<double>{}), ConfigError);
}
