#include <random>

#include <gtest/gtest.h>

#include "cascade/rates.hpp"

using namespace cascade;

namespace {

// Independent route to the rate amplitude: in the rotating frame each
// intermediate level k of the 1 -> 1+2n path contributes a resolvent
// 1 / (-h_k + i g_k), with h_k from the bare energies minus the photon
// energies absorbed/emitted so far and g_k = gamma (excited) or gamma'
// (ground).
double resolvent_amplitude(const std::vector<double>& e, double ws, double dws, double omega,
                           double gamma, double gp, int n)
{
    std::complex<double> prod = 1.0;
    double frame = e[0];
    for (int k = 2; k <= 2 * n + 1; ++k) {
        frame += (k % 2 == 0) ? ws + dws : -ws;
        const double h = e[k - 1] - frame;
        const double g = (k % 2 == 0) ? gamma : gp;
        if (k <= 2 * n)
            prod *= std::complex<double>(-h, g);
    }
    return units::two_pi * std::pow(omega, 4 * n) / std::norm(prod);
}

} // namespace

TEST(Rates, MatchResolventProduct)
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> jitter(-0.05, 0.05);
    for (int trial = 0; trial < 40; ++trial) {
        const int n_levels = 7;
        const double ws = 1000.0, dws = 2.0, gamma = 5.0, gp = 0.01, om = 0.3;
        std::vector<double> e(n_levels, 0.0);
        for (int m = 1; m < n_levels; ++m)
            e[m] = e[m - 1] + ((m % 2 == 1) ? ws + dws : -ws) + jitter(rng);
        const SystemParams p(n_levels, om, gamma, gp, detunings_from_energies(e, ws, dws), dws);
        for (int n = 1; n <= 3; ++n) {
            const auto r = transition_amplitude(p, BareLevels{e, ws}, n);
            const double ref = resolvent_amplitude(e, ws, dws, om, gamma, gp, n);
            EXPECT_NEAR(r.amplitude / ref, 1.0, 1e-10);
            EXPECT_EQ(r.order_2n, 2 * n);
            EXPECT_DOUBLE_EQ(r.resonance_frequency, n * dws);
        }
    }
}

TEST(Rates, ResonantLimit)
{
    const SystemParams p(7, 0.02, 1.0, 3e-4, std::vector<double>(6, 0.0), 0.5);
    for (int n = 1; n <= 3; ++n) {
        const auto det = transition_amplitude(p, n, 123.0);
        const auto res = resonant_amplitude(p, n);
        EXPECT_NEAR(det.amplitude / res.amplitude, 1.0, 1e-12);
        EXPECT_TRUE(det.resonant);
    }
}

TEST(Rates, RatioIsGeometric)
{
    const SystemParams p(13, 0.02, 1.0, 3e-4, std::vector<double>(12, 0.0), 0.5);
    const double x = p.j_o() / p.gamma_prime();
    for (int n = 1; n <= 6; ++n) {
        EXPECT_EQ(rate_ratio(p, n), std::pow(x, 2 * n - 2));
        EXPECT_NEAR(resonant_amplitude(p, n).amplitude / resonant_amplitude(p, 1).amplitude,
                    rate_ratio(p, n), 1e-14 * rate_ratio(p, n));
    }
}

TEST(Rates, DetuningBreaksResonance)
{
    const SystemParams p(5, 0.02, 1.0, 3e-4, {0.0, 0.01, 0.0, 0.0}, 0.5);
    // w_{3,1} - dw_s = -(Delta_1 - Delta_2) != 0 moves both paths off shell
    EXPECT_FALSE(transition_amplitude(p, 1).resonant);
    EXPECT_FALSE(transition_amplitude(p, 2).resonant);
}

TEST(Rates, Support)
{
    const SystemParams p5(5, 0.02, 1.0, 3e-4, std::vector<double>(4, 0.0), 0.5);
    EXPECT_THROW(transition_amplitude(p5, 3), ConfigError);
    EXPECT_THROW(transition_amplitude(p5, 0), ConfigError);
    const SystemParams p9(9, 0.02, 1.0, 3e-4, std::vector<double>(8, 0.0), 0.5);
    EXPECT_THROW(transition_amplitude(p9, 4), ConfigError);
    EXPECT_NO_THROW(resonant_amplitude(p9, 4));
    EXPECT_THROW(resonant_amplitude(p9, 0), ConfigError);
    EXPECT_THROW(rate_ratio(p9, 0), ConfigError);
    EXPECT_THROW(transition_amplitude(p5, BareLevels{{0.0, 1.0}, 0.0}, 1), ConfigError);
}
