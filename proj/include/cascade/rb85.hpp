#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cascade/error.hpp"
#include "cascade/level_system.hpp"
#include "cascade/liouvillian.hpp"

// 85Rb D2 model: ground F = 3 (7 Zeeman states) and excited F' = 4
// (9 Zeeman states) driven by two phase-coherent fields of different
// polarization, plus the truncated 13-level ladder used for comparison.

namespace cascade::rb85 {

namespace detail {

inline double factorial(int n)
{
    if (n < 0)
        throw ConfigError("negative factorial argument");
    double f = 1.0;
    for (int k = 2; k <= n; ++k)
        f *= k;
    return f;
}

} // namespace detail

/// <j1 m1; j2 m2 | J M> from the Racah closed form. Arguments are doubled
/// (2j, 2m) so half-integer momenta are representable.
inline double clebsch_gordan(int tj1, int tm1, int tj2, int tm2, int tJ, int tM)
{
    using detail::factorial;
    if (tm1 + tm2 != tM)
        return 0.0;
    if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tM) > tJ)
        return 0.0;
    if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tJ + tM) % 2)
        return 0.0;
    if (tJ < std::abs(tj1 - tj2) || tJ > tj1 + tj2 || (tj1 + tj2 + tJ) % 2)
        return 0.0;

    const int a = (tj1 + tj2 - tJ) / 2; // j1 + j2 - J
    const int b = (tj1 - tm1) / 2;      // j1 - m1
    const int c = (tj2 + tm2) / 2;      // j2 + m2
    const int d = (tJ - tj2 + tm1) / 2; // J - j2 + m1
    const int e = (tJ - tj1 - tm2) / 2; // J - j1 - m2

    const double pre = std::sqrt((tJ + 1) * factorial((tJ + tj1 - tj2) / 2) *
                                 factorial((tJ - tj1 + tj2) / 2) * factorial(a) /
                                 factorial((tj1 + tj2 + tJ) / 2 + 1)) *
                       std::sqrt(factorial((tJ + tM) / 2) * factorial((tJ - tM) / 2) *
                                 factorial((tj1 - tm1) / 2) * factorial((tj1 + tm1) / 2) *
                                 factorial((tj2 - tm2) / 2) * factorial((tj2 + tm2) / 2));
    double sum = 0.0;
    const int k_min = std::max({0, -d, -e});
    const int k_max = std::min({a, b, c});
    for (int k = k_min; k <= k_max; ++k) {
        const double term = 1.0 / (factorial(k) * factorial(a - k) * factorial(b - k) *
                                   factorial(c - k) * factorial(d + k) * factorial(e + k));
        sum += (k % 2 == 0) ? term : -term;
    }
    return pre * sum;
}

/// Coupling amplitude <F_g m_g; 1 q | F_e m_e> for an E1 transition.
inline double cg_amplitude(int f_g, int m_g, int q, int f_e, int m_e)
{
    if (f_g < 0 || f_e < 0 || std::abs(m_g) > f_g || std::abs(m_e) > f_e || std::abs(q) > 1)
        throw ConfigError("invalid quantum numbers for a dipole coupling");
    return clebsch_gordan(2 * f_g, 2 * m_g, 2, 2 * q, 2 * f_e, 2 * m_e);
}

/// Squared Clebsch-Gordan coefficient |<F_g m_g; 1 q | F_e m_e>|^2. For a
/// closed F_e -> F_g line these are the spontaneous branching weights.
inline double cg_weight(int f_g, int m_g, int q, int f_e, int m_e)
{
    const double a = cg_amplitude(f_g, m_g, q, f_e, m_e);
    return a * a;
}

struct ZeemanManifold {
    int f = 3;
    double splitting = 0.0; // energy step per unit m_F (angular)

    int size() const { return 2 * f + 1; }
};

enum class Polarization { sigma_minus = -1, pi = 0, sigma_plus = 1 };

inline int spherical_index(Polarization p) { return static_cast<int>(p); }

struct DriveField {
    Polarization polarization = Polarization::pi;
    double rabi = 0.0;
    double detuning = 0.0;         // w_line - w_s (carrier detuning from F -> F')
    double frequency_offset = 0.0; // field frequency is w_s + offset (0 or dw_s)
};

struct FullModel {
    CouplingGraph graph;
    std::vector<int> ground_states;  // graph indices of m_F = -F..F
    std::vector<int> excited_states; // graph indices of m_F' = -F'..F'
    double raman_step = 0.0;         // rotating-frame frequency per unit m_F
};

/// Coupling graph of the two-field driven F -> F' system.
///
/// Ground states come first (m_F ascending), then the excited manifold.
/// Two fields a, b with spherical components q_a != q_b fix a rotating frame
/// in which the Hamiltonian is static: f(g_m) = m * kappa with
/// kappa = (w_a - w_b) / (q_a - q_b) and f(e_m) = f(g_{m - q_a}) + w_a.
/// Excited levels decay to every E1-allowed ground level at
/// gamma * |CG|^2, ground levels relax to m_F +- 1 at gamma'.
inline FullModel build_full_model(const ZeemanManifold& ground, const ZeemanManifold& excited,
                                  const std::vector<DriveField>& drives, double gamma,
                                  double gamma_prime)
{
    if (drives.size() != 2)
        throw ConfigError("the two-tone protocol needs exactly two drive fields");
    const auto& fa = drives[0];
    const auto& fb = drives[1];
    const int qa = spherical_index(fa.polarization);
    const int qb = spherical_index(fb.polarization);
    if (qa == qb)
        throw ConfigError("drive fields must have different polarizations");
    if (!(gamma > 0.0) || !(gamma_prime > 0.0))
        throw ConfigError("gamma and gamma_prime must be positive");
    if (std::abs(ground.f - excited.f) > 1)
        throw ConfigError("F -> F' must be dipole allowed");

    // field frequencies relative to the (cancelling) line frequency
    const double wa = -fa.detuning + fa.frequency_offset;
    const double wb = -fb.detuning + fb.frequency_offset;
    const double kappa = (wa - wb) / static_cast<double>(qa - qb);
    if (kappa == 0.0)
        throw ConfigError("drive fields need a Raman frequency offset between them");

    const int ng = ground.size();
    const int ne = excited.size();
    const int d = ng + ne;
    auto gi = [&](int m) { return m + ground.f; };
    auto ei = [&](int m) { return ng + m + excited.f; };

    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(d, d);
    for (int m = -ground.f; m <= ground.f; ++m)
        H(gi(m), gi(m)) = m * ground.splitting - m * kappa;
    for (int m = -excited.f; m <= excited.f; ++m)
        H(ei(m), ei(m)) = m * excited.splitting - (m - qa) * kappa - wa;

    for (const auto& field : drives) {
        const int q = spherical_index(field.polarization);
        for (int m = -ground.f; m <= ground.f; ++m) {
            const int me = m + q;
            if (std::abs(me) > excited.f)
                continue;
            const double c = field.rabi * cg_amplitude(ground.f, m, q, excited.f, me);
            H(gi(m), ei(me)) += c;
            H(ei(me), gi(m)) += c;
        }
    }

    std::vector<Decay> decays;
    for (int me = -excited.f; me <= excited.f; ++me)
        for (int q = -1; q <= 1; ++q) {
            const int mg = me - q;
            if (std::abs(mg) > ground.f)
                continue;
            const double w = cg_weight(ground.f, mg, q, excited.f, me);
            if (w > 0.0)
                decays.push_back({ei(me), gi(mg), gamma * w});
        }
    for (int m = -ground.f; m < ground.f; ++m) {
        decays.push_back({gi(m), gi(m + 1), gamma_prime});
        decays.push_back({gi(m + 1), gi(m), gamma_prime});
    }

    FullModel out{CouplingGraph(std::move(H), std::move(decays)), {}, {}, kappa};
    for (int m = -ground.f; m <= ground.f; ++m)
        out.ground_states.push_back(gi(m));
    for (int m = -excited.f; m <= excited.f; ++m)
        out.excited_states.push_back(ei(m));
    return out;
}

/// Physical inputs of the 16-state model in one place.
struct Rb85Params {
    double gamma = 0.0;
    double gamma_prime = 0.0;
    double rabi = 0.0;
    double delta_omega_s = 0.0;
    double ground_splitting = 0.0;
    double excited_splitting = 0.0;
    double optical_detuning = 0.0;   // carrier detuning from the F=3 -> F'=4 line
    bool offset_on_sigma_plus = true; // which field carries w_s + dw_s
};

inline std::vector<DriveField> two_tone_drives(const Rb85Params& p)
{
    DriveField sigma{Polarization::sigma_plus, p.rabi, p.optical_detuning,
                     p.offset_on_sigma_plus ? p.delta_omega_s : 0.0};
    DriveField pi{Polarization::pi, p.rabi, p.optical_detuning,
                  p.offset_on_sigma_plus ? 0.0 : p.delta_omega_s};
    return {sigma, pi};
}

inline FullModel build_full_model(const Rb85Params& p)
{
    return build_full_model(ZeemanManifold{3, p.ground_splitting},
                            ZeemanManifold{4, p.excited_splitting}, two_tone_drives(p), p.gamma,
                            p.gamma_prime);
}

/// Truncated ladder: 7 ground and 6 excited levels with uniform coupling
/// and the two-channel adjacent decay model.
inline CouplingGraph build_truncated_13(const SystemParams& params)
{
    if (params.n_levels() != 13)
        throw ConfigError("the truncated ladder has 13 levels (got " +
                          std::to_string(params.n_levels()) + ")");
    return cascade_graph(params);
}

} // namespace cascade::rb85
