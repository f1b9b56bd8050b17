#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cascade/error.hpp"

// Level model of an N-level cascaded-Lambda chain.
//
// Levels are labelled m = 1..N. Odd m are ground Zeeman states, even m are
// excited ones. Field 1 (frequency w_s + dw_s) drives the transitions that
// start from an odd level (m -> m+1 with m odd), field 2 (frequency w_s)
// those that start from an even one. Only detunings are stored:
//
//     Delta_m = (-1)^m (w_m - w_{m+1}) - w^s_m,   m = 1..N-1
//
// In the rotating frame the Hamiltonian is time independent with diagonal
// entries h_m = sum_{n<m} (-1)^{n+1} Delta_n and couplings Omega between
// neighbours.

namespace cascade {

enum class Parity { ground, excited };

/// A 1-based level label together with its parity (odd = ground).
class LevelIndex {
public:
    LevelIndex(int m, int n_levels) : m_(m)
    {
        if (m < 1 || m > n_levels)
            throw ConfigError("level index " + std::to_string(m) + " outside 1.." +
                              std::to_string(n_levels));
    }

    int m() const { return m_; }
    Parity parity() const { return (m_ % 2 == 1) ? Parity::ground : Parity::excited; }
    bool is_ground() const { return parity() == Parity::ground; }

    /// 0-based position in matrices.
    int offset() const { return m_ - 1; }

private:
    int m_;
};

class SystemParams {
public:
    SystemParams(int n_levels, double rabi, double gamma, double gamma_prime,
                 std::vector<double> detunings, double delta_omega_s)
        : n_levels_(n_levels), rabi_(rabi), gamma_(gamma), gamma_prime_(gamma_prime),
          detunings_(std::move(detunings)), delta_omega_s_(delta_omega_s)
    {
        if (n_levels_ < 3 || n_levels_ % 2 == 0)
            throw ConfigError("n_levels must be odd and >= 3 (got " + std::to_string(n_levels_) + ")");
        if (!(gamma_ > 0.0))
            throw ConfigError("gamma must be positive");
        if (!(gamma_prime_ > 0.0))
            throw ConfigError("gamma_prime must be positive");
        if (!(rabi_ >= 0.0))
            throw ConfigError("rabi must be non-negative");
        if (!(delta_omega_s_ > 0.0))
            throw ConfigError("delta_omega_s must be positive");
        if (static_cast<int>(detunings_.size()) != n_levels_ - 1)
            throw ConfigError("expected " + std::to_string(n_levels_ - 1) + " detunings, got " +
                              std::to_string(detunings_.size()));
        for (double d : detunings_)
            if (!std::isfinite(d))
                throw ConfigError("detunings must be finite");
    }

    int n_levels() const { return n_levels_; }
    int n_ground() const { return (n_levels_ + 1) / 2; }
    double rabi() const { return rabi_; }
    double gamma() const { return gamma_; }
    double gamma_prime() const { return gamma_prime_; }
    double delta_omega_s() const { return delta_omega_s_; }
    const std::vector<double>& detunings() const { return detunings_; }

    /// Delta_m for 1 <= m <= N-1.
    double detuning(int m) const { return detunings_.at(static_cast<std::size_t>(m - 1)); }

    /// Dissipative hopping scale J_o = Omega^2 / gamma.
    double j_o() const { return rabi_ * rabi_ / gamma_; }

    SystemParams with_rabi(double rabi) const
    {
        return {n_levels_, rabi, gamma_, gamma_prime_, detunings_, delta_omega_s_};
    }
    SystemParams with_detunings(std::vector<double> detunings) const
    {
        return {n_levels_, rabi_, gamma_, gamma_prime_, std::move(detunings), delta_omega_s_};
    }

private:
    int n_levels_;
    double rabi_;
    double gamma_;
    double gamma_prime_;
    std::vector<double> detunings_;
    double delta_omega_s_;
};

/// Detuning pattern for equal ground and excited Zeeman splittings:
/// every field-1 transition is detuned by `delta`, every field-2 one is on
/// resonance (Delta_odd = delta, Delta_even = 0).
inline std::vector<double> alternating_detunings(int n_levels, double delta)
{
    std::vector<double> out(static_cast<std::size_t>(std::max(n_levels - 1, 0)), 0.0);
    for (std::size_t i = 0; i < out.size(); i += 2)
        out[i] = delta;
    return out;
}

/// w^s_n: w_s + dw_s for odd n, w_s for even n.
inline double field_frequency(int n, double omega_s, double delta_omega_s)
{
    return (n % 2 == 1) ? omega_s + delta_omega_s : omega_s;
}

/// Detunings Delta_m from bare level energies w_1..w_N and the laser carrier.
inline std::vector<double> detunings_from_energies(const std::vector<double>& energies,
                                                   double omega_s, double delta_omega_s)
{
    if (energies.size() < 3)
        throw ConfigError("need at least 3 level energies");
    std::vector<double> out(energies.size() - 1);
    for (std::size_t i = 0; i + 1 < energies.size(); ++i) {
        const int m = static_cast<int>(i) + 1;
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        out[i] = sign * (energies[i] - energies[i + 1]) - field_frequency(m, omega_s, delta_omega_s);
    }
    return out;
}

/// Inverse of detunings_from_energies with w_1 = omega_1.
inline std::vector<double> energies_from_detunings(const SystemParams& params, double omega_s,
                                                   double omega_1 = 0.0)
{
    std::vector<double> e(static_cast<std::size_t>(params.n_levels()));
    e[0] = omega_1;
    for (int m = 1; m < params.n_levels(); ++m) {
        const double sign = (m % 2 == 0) ? 1.0 : -1.0;
        // w_{m+1} = w_m - (-1)^m (Delta_m + w^s_m)
        e[m] = e[m - 1] - sign * (params.detuning(m) +
                                  field_frequency(m, omega_s, params.delta_omega_s()));
    }
    return e;
}

/// Rotating-frame level shifts h_m = sum_{n<m} (-1)^{n+1} Delta_n, m = 1..N.
inline std::vector<double> rotating_diagonal(const SystemParams& params)
{
    std::vector<double> h(static_cast<std::size_t>(params.n_levels()), 0.0);
    for (int m = 2; m <= params.n_levels(); ++m) {
        const int n = m - 1;
        const double sign = (n % 2 == 1) ? 1.0 : -1.0;
        h[m - 1] = h[m - 2] + sign * params.detuning(n);
    }
    return h;
}

inline Eigen::MatrixXcd build_rotating_hamiltonian(const SystemParams& params)
{
    const int n = params.n_levels();
    const auto h = rotating_diagonal(params);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        H(i, i) = h[i];
    for (int i = 0; i + 1 < n; ++i) {
        H(i, i + 1) = params.rabi();
        H(i + 1, i) = params.rabi();
    }
    return H;
}

/// Phase rate theta_{m,m'} relating lab-frame and rotating-frame operators,
/// sigma_{m,m'}(t) = exp(-i theta t) sigma^R_{m,m'}(t). The optical carrier
/// omega_s cancels for ground-ground pairs; it only matters when one index
/// is excited.
inline double rotating_phase(const LevelIndex& m, const LevelIndex& m_prime,
                             const SystemParams& params, double omega_s = 0.0)
{
    auto partial = [&](int upto) {
        double s = 0.0;
        for (int n = 1; n < upto; ++n) {
            const double sign = (n % 2 == 0) ? 1.0 : -1.0;
            s += sign * field_frequency(n, omega_s, params.delta_omega_s());
        }
        return s;
    };
    if (m.m() > params.n_levels() || m_prime.m() > params.n_levels())
        throw ConfigError("level index outside the chain");
    return partial(m.m()) - partial(m_prime.m());
}

/// Ground level labels 1, 3, ..., N.
inline std::vector<int> ground_labels(int n_levels)
{
    std::vector<int> out;
    for (int l = 1; l <= n_levels; l += 2)
        out.push_back(l);
    return out;
}

} // namespace cascade
