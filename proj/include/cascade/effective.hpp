#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cascade/error.hpp"
#include "cascade/level_system.hpp"
#include "cascade/liouvillian.hpp"

// Reduced ground-manifold dynamics after adiabatic elimination of the
// excited levels (valid for Delta_m < Omega << gamma).
//
// Ground levels l = 1, 3, ..., N are stored at positions a = (l - 1) / 2.
// With J_o = Omega^2 / gamma the rotating-frame equations read, for the
// operator-form coordinates X_{l,l'} = <sigma^R_{l,l'}> = rho_{l',l},
//
//   dX/dt = i (H_eff X - X H_eff^dagger) (1 - delta_{l,l'})
//           - gt_{l,l'} (1 - delta_{l,l'}) X
//           - sum_j [ (g'_{l,j} + g'_{l',j}) / 2 X_{l,l'} - g'_{j,l} delta_{l,l'} X_{j,j} ]
//
//   H_eff = sum_l h_l |l><l| + i J_o sum_l (|l><l-2| + |l-2><l|)
//   g'_{l,l'}  = J_o + gamma'  for |l - l'| = 2, else 0
//   gt_{l,l'}  = (4 - d_{l,1} - d_{l,N} - d_{l',1} - d_{l',N}) J_o / 2
//
// Transposing to density-matrix coordinates turns the non-Hermitian
// sandwich into -i (H_eff^* rho - rho H_eff^T). Populations never see H_eff.

namespace cascade {

struct EffectiveParams {
    int n_levels = 3;
    int n_ground = 2;
    double j_o = 0.0;
    double gamma_prime = 0.0;
    std::vector<double> ground_shifts;  // h_l for l = 1, 3, ..., N
    Eigen::MatrixXd pop_rates;          // g'_{l,l'}
    Eigen::MatrixXd coh_damp;           // gt_{l,l'}

    static EffectiveParams from(const SystemParams& p)
    {
        EffectiveParams e;
        e.n_levels = p.n_levels();
        e.n_ground = p.n_ground();
        e.j_o = p.j_o();
        e.gamma_prime = p.gamma_prime();
        const auto h = rotating_diagonal(p);
        for (int a = 0; a < e.n_ground; ++a)
            e.ground_shifts.push_back(h[2 * a]);

        const int g = e.n_ground;
        e.pop_rates = Eigen::MatrixXd::Zero(g, g);
        for (int a = 0; a + 1 < g; ++a) {
            e.pop_rates(a, a + 1) = e.j_o + e.gamma_prime;
            e.pop_rates(a + 1, a) = e.j_o + e.gamma_prime;
        }
        auto edge = [&](int a) { return (a == 0 ? 1 : 0) + (a == g - 1 ? 1 : 0); };
        e.coh_damp = Eigen::MatrixXd::Zero(g, g);
        for (int a = 0; a < g; ++a)
            for (int b = 0; b < g; ++b)
                e.coh_damp(a, b) = (4 - edge(a) - edge(b)) * e.j_o / 2.0;
        return e;
    }
};

/// Nearest-neighbour ground hopping V_eff = hopping * (|l><l-2| + h.c.) at t = 0.
inline Eigen::MatrixXcd ground_hopping(int n_ground, std::complex<double> hopping)
{
    Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(n_ground, n_ground);
    for (int a = 0; a + 1 < n_ground; ++a) {
        v(a + 1, a) = hopping;
        v(a, a + 1) = hopping;
    }
    return v;
}

class EffectiveGenerator {
public:
    EffectiveGenerator(EffectiveParams params, Eigen::MatrixXcd h_eff, GeneratorMatrix generator,
                       std::vector<std::string> warnings)
        : params_(std::move(params)), h_eff_(std::move(h_eff)), generator_(std::move(generator)),
          warnings_(std::move(warnings))
    {
    }

    const EffectiveParams& params() const { return params_; }
    /// H_eff in the operator form (hopping +i J_o).
    const Eigen::MatrixXcd& h_eff() const { return h_eff_; }
    /// The anti-Hermitian coupling V_eff = i J_o (...) at the t = 0 phase.
    Eigen::MatrixXcd v_eff() const { return ground_hopping(params_.n_ground, {0.0, params_.j_o}); }
    const GeneratorMatrix& generator() const { return generator_; }
    const Eigen::MatrixXcd& matrix() const { return generator_.matrix(); }
    int n_ground() const { return params_.n_ground; }
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    EffectiveParams params_;
    Eigen::MatrixXcd h_eff_;
    GeneratorMatrix generator_;
    std::vector<std::string> warnings_;
};

inline EffectiveGenerator reduce(const EffectiveParams& e)
{
    const int g = e.n_ground;
    if (g < 2)
        throw ConfigError("effective model needs at least two ground levels");
    if (!(e.gamma_prime > 0.0) || !(e.j_o >= 0.0))
        throw ConfigError("effective rates must be positive");

    Eigen::MatrixXcd h_eff = ground_hopping(g, {0.0, e.j_o});
    for (int a = 0; a < g; ++a)
        h_eff(a, a) = e.ground_shifts.at(a);
    const Eigen::MatrixXcd k = h_eff.conjugate();
    const Eigen::MatrixXcd kt = h_eff.transpose();

    const int n = g * g;
    const std::complex<double> minus_i(0.0, -1.0);
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);
    Eigen::VectorXd out = e.pop_rates.rowwise().sum();

    for (int b = 0; b < g; ++b) {
        for (int a = 0; a < g; ++a) {
            const int row = vec_index(a, b, g);
            if (a != b) {
                // -i (K rho - rho K^dagger) with K = H_eff^*, so K^dagger = H_eff^T
                for (int c = 0; c < g; ++c) {
                    if (k(a, c) != 0.0)
                        L(row, vec_index(c, b, g)) += minus_i * k(a, c);
                    if (kt(c, b) != 0.0)
                        L(row, vec_index(a, c, g)) -= minus_i * kt(c, b);
                }
                L(row, row) -= e.coh_damp(a, b);
            }
            L(row, row) -= 0.5 * (out(a) + out(b));
        }
    }
    for (int a = 0; a < g; ++a)
        for (int j = 0; j < g; ++j)
            if (j != a)
                L(vec_index(a, a, g), vec_index(j, j, g)) += e.pop_rates(j, a);

    return EffectiveGenerator(e, std::move(h_eff), GeneratorMatrix(std::move(L)), {});
}

/// Effective generator for an N-level chain. Adds a warning when the
/// adiabatic-elimination premises (Omega << gamma, |Delta_m| < Omega) look
/// violated; the result is still returned.
inline EffectiveGenerator reduce(const SystemParams& p)
{
    std::vector<std::string> warnings;
    if (p.rabi() / p.gamma() > 0.05)
        warnings.push_back("Omega/gamma = " + std::to_string(p.rabi() / p.gamma()) +
                           " > 0.05: adiabatic elimination is inaccurate");
    for (double d : p.detunings())
        if (std::abs(d) >= p.rabi() && d != 0.0) {
            warnings.push_back("some |Delta_m| >= Omega");
            break;
        }
    auto gen = reduce(EffectiveParams::from(p));
    return EffectiveGenerator(gen.params(), gen.h_eff(), gen.generator(), std::move(warnings));
}

/// Steady state of the reduced dynamics on the ground manifold.
inline DensityMatrix effective_steady_state(const EffectiveGenerator& gen,
                                            SteadyStateOptions opt = {})
{
    return steady_state(gen.generator(), opt);
}

/// ||P conj(V) P^-1 + V||_2 with P the level reflection l -> N - l + 1.
/// Zero when V anticommutes with PT.
inline double anti_pt_defect(const Eigen::MatrixXcd& v)
{
    const auto g = v.rows();
    Eigen::MatrixXcd reflected(g, g);
    for (Eigen::Index a = 0; a < g; ++a)
        for (Eigen::Index b = 0; b < g; ++b)
            reflected(a, b) = std::conj(v(g - 1 - a, g - 1 - b));
    Eigen::MatrixXcd s = reflected + v;
    if (s.cwiseAbs().maxCoeff() == 0.0)
        return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s);
    return svd.singularValues()(0);
}

inline double anti_pt_defect(const EffectiveGenerator& gen) { return anti_pt_defect(gen.v_eff()); }

// ---------------------------------------------------------------------------
// Closed forms for the resonant-ladder steady-state coherences, with the
// detuning pattern Delta_odd = Delta, Delta_even = 0. Keys are 1-based level
// labels (l, l') with l < l'; values are rho^R_{l,l'}.

struct ClosedFormCoherences {
    std::map<std::pair<int, int>, std::complex<double>> values;
    bool leading_order = false;  // N = 7: lowest order in J_o / gamma'
    bool within_validity = true; // N = 7: J_o / gamma' <= validity_ratio
    static constexpr double validity_ratio = 0.05;
};

inline ClosedFormCoherences closed_form_coherences(int n_levels, double j_o, double gamma_prime,
                                                   double delta)
{
    using C = std::complex<double>;
    const C i(0.0, 1.0);
    const double J = j_o, g = gamma_prime, D = delta;
    ClosedFormCoherences out;
    switch (n_levels) {
    case 3:
        out.values[{1, 3}] = -J / ((g + 2.0 * J) - i * D);
        break;
    case 5: {
        const C den = 8.0 * J * J + 12.0 * J * g + 3.0 * g * g - 8.0 * i * (2.0 * J + g) * D -
                      4.0 * D * D;
        const C r13 = -4.0 / 3.0 * J * (2.0 * J + g - 2.0 * i * D) / den;
        out.values[{1, 3}] = r13;
        out.values[{3, 5}] = r13;
        out.values[{1, 5}] = 8.0 / 3.0 * J * J / den;
        break;
    }
    case 7: {
        const C r13 = -J / (3.0 * g - 2.0 * i * D);
        const C r15 = J * J * (7.0 * g - 4.0 * i * D) /
                      (18.0 * g * g * g - 45.0 * i * g * g * D - 34.0 * g * D * D +
                       8.0 * i * D * D * D);
        const C r17 = -2.0 * J * J * J * (7.0 * g - 4.0 * i * D) /
                      (18.0 * std::pow(g, 4) - 99.0 * i * g * g * g * D - 169.0 * g * g * D * D +
                       110.0 * i * g * D * D * D + 24.0 * std::pow(D, 4));
        // interior pairs are taken equal to the edge pairs of the same span
        out.values[{1, 3}] = r13;
        out.values[{3, 5}] = r13;
        out.values[{5, 7}] = r13;
        out.values[{1, 5}] = r15;
        out.values[{3, 7}] = r15;
        out.values[{1, 7}] = r17;
        out.leading_order = true;
        out.within_validity = J <= ClosedFormCoherences::validity_ratio * g;
        break;
    }
    default:
        throw ConfigError("closed forms exist only for n_levels 3, 5, 7 (got " +
                          std::to_string(n_levels) + ")");
    }
    return out;
}

/// Two-peak height ratio of the 5-level chain,
/// H_{2,1} = 2 J_o^2 / ((gamma' + 2 J_o)^2 + 4 Delta^2).
inline double closed_form_h21_n5(double j_o, double gamma_prime, double delta)
{
    const double s = gamma_prime + 2.0 * j_o;
    return 2.0 * j_o * j_o / (s * s + 4.0 * delta * delta);
}

/// Small-J_o height ratios of the resonant 7-level chain:
/// H_{2,1} = 49/54 (J_o/gamma')^2, H_{3,1} = 49/27 (J_o/gamma')^4.
inline std::pair<double, double> closed_form_ratios_n7(double j_o, double gamma_prime)
{
    const double x = j_o / gamma_prime;
    return {49.0 / 54.0 * x * x, 49.0 / 27.0 * x * x * x * x};
}

} // namespace cascade
