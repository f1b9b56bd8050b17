#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cascade/error.hpp"
#include "cascade/level_system.hpp"
#include "cascade/units.hpp"

// Lowest-order multi-photon transition rates |1> -> |1+2n> of the driven
// chain. Each rate is amplitude * delta(w_{1+2n,1} - n dw_s); the delta
// function is kept symbolic as (amplitude, resonance frequency, on-shell flag).

namespace cascade {

struct RateResult {
    int order_2n = 2;                // number of photons
    double amplitude = 0.0;          // prefactor of the delta function
    double resonance_frequency = 0.0; // n * dw_s
    bool resonant = false;           // w_{1+2n,1} == n dw_s within 1e-9 dw_s
};

/// Bare level energies w_1..w_N and the laser carrier w_s.
struct BareLevels {
    std::vector<double> energies;
    double omega_s = 0.0;
};

inline constexpr int max_detuned_order = 3;

/// Rate amplitude for |1> -> |1+2n>, n = 1..3, with arbitrary detunings.
inline RateResult transition_amplitude(const SystemParams& p, const BareLevels& levels, int n)
{
    if (n < 1 || n > max_detuned_order)
        throw ConfigError("detuned transition amplitudes are available for n = 1..3 only (got " +
                          std::to_string(n) + ")");
    if (1 + 2 * n > p.n_levels())
        throw ConfigError("chain has no level " + std::to_string(1 + 2 * n));
    if (static_cast<int>(levels.energies.size()) != p.n_levels())
        throw ConfigError("need one bare energy per level");

    using C = std::complex<double>;
    const C i(0.0, 1.0);
    const auto& e = levels.energies;
    auto w = [&](int a, int b) { return e[a - 1] - e[b - 1]; };
    const double ws1 = levels.omega_s + p.delta_omega_s();
    const double ws2 = levels.omega_s;
    const double dws = p.delta_omega_s();
    const double g = p.gamma();
    const double gp = p.gamma_prime();
    const double om = p.rabi();

    const C d1 = ws1 - w(2, 1) + i * g;
    C denominator;
    switch (n) {
    case 1:
        denominator = d1;
        break;
    case 2:
        denominator = (2.0 * ws1 - ws2 - w(4, 1) + i * g) * (dws - w(3, 1) + i * gp) * d1;
        break;
    default:
        denominator = (w(1, 6) - 2.0 * ws2 + 3.0 * ws1 + i * g) * (2.0 * dws - w(5, 1) + i * gp) *
                      (w(1, 4) - ws2 + 2.0 * ws1 + i * g) * (dws - w(3, 1) + i * gp) * d1;
        break;
    }
    const double numerator = std::pow(om, 2 * n);
    RateResult r;
    r.order_2n = 2 * n;
    r.amplitude = units::two_pi * std::norm(numerator / denominator);
    r.resonance_frequency = n * dws;
    r.resonant = std::abs(w(1 + 2 * n, 1) - n * dws) <= 1e-9 * dws;
    return r;
}

/// Same amplitude with the bare energies reconstructed from the stored
/// detunings (w_1 = 0, carrier w_s).
inline RateResult transition_amplitude(const SystemParams& p, int n, double omega_s = 0.0)
{
    return transition_amplitude(p, BareLevels{energies_from_detunings(p, omega_s), omega_s}, n);
}

/// On-resonance amplitude 2 pi J_o^{2n} / gamma'^{2n-2}, any n >= 1.
inline RateResult resonant_amplitude(const SystemParams& p, int n)
{
    if (n < 1)
        throw ConfigError("photon order index n must be >= 1");
    RateResult r;
    r.order_2n = 2 * n;
    r.amplitude = units::two_pi * std::pow(p.j_o(), 2 * n) / std::pow(p.gamma_prime(), 2 * n - 2);
    r.resonance_frequency = n * p.delta_omega_s();
    r.resonant = true;
    return r;
}

/// W^(2n) / W^(2) on resonance, (J_o / gamma')^{2n-2}.
inline double rate_ratio(const SystemParams& p, int n)
{
    if (n < 1)
        throw ConfigError("photon order index n must be >= 1");
    return std::pow(p.j_o() / p.gamma_prime(), 2 * n - 2);
}

} // namespace cascade
