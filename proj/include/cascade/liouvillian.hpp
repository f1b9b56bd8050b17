#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cascade/error.hpp"
#include "cascade/level_system.hpp"

// Rotating-frame master equation
//
//   d rho / dt = -i [H, rho]
//                - sum_n (g_{m,n} + g_{m',n}) / 2 * rho_{m,m'}
//                + delta_{m,m'} sum_n g_{n,m} rho_{n,n}
//
// where g_{a,b} is the population transfer rate a -> b. Decays feed
// populations only; there is no jump-induced transfer of coherence.
//
// Vectorization: column stacking, vec(rho)[i + d*j] = rho(i, j). This is
// Eigen's native storage order, so a d x d matrix maps onto its d^2 vector
// without copies. All index arithmetic below goes through vec_index().

namespace cascade {

using cd = std::complex<double>;

inline constexpr int vec_index(int i, int j, int d) { return i + d * j; }

struct Decay {
    int source;
    int target;
    double rate;
};

/// States, Hermitian Hamiltonian and incoherent population-transfer channels.
class CouplingGraph {
public:
    CouplingGraph(Eigen::MatrixXcd hamiltonian, std::vector<Decay> decays)
        : hamiltonian_(std::move(hamiltonian)), decays_(std::move(decays))
    {
        const auto d = hamiltonian_.rows();
        if (d < 1 || hamiltonian_.cols() != d)
            throw ConfigError("hamiltonian must be square and non-empty");
        const double scale = std::max(1.0, hamiltonian_.cwiseAbs().maxCoeff());
        if ((hamiltonian_ - hamiltonian_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw ConfigError("hamiltonian is not Hermitian");
        for (const auto& c : decays_) {
            if (c.source < 0 || c.source >= d || c.target < 0 || c.target >= d)
                throw ConfigError("decay channel references a missing state");
            if (c.source == c.target)
                throw ConfigError("decay channel source equals target");
            if (!(c.rate >= 0.0) || !std::isfinite(c.rate))
                throw ConfigError("decay rates must be finite and non-negative");
        }
    }

    int n_states() const { return static_cast<int>(hamiltonian_.rows()); }
    const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
    const std::vector<Decay>& decays() const { return decays_; }

    /// Total population outflow rate of a state.
    double outflow(int state) const
    {
        double s = 0.0;
        for (const auto& c : decays_)
            if (c.source == state)
                s += c.rate;
        return s;
    }

    /// Summed transfer rate from `source` to `target` over all channels.
    double rate(int source, int target) const
    {
        double s = 0.0;
        for (const auto& c : decays_)
            if (c.source == source && c.target == target)
                s += c.rate;
        return s;
    }

private:
    Eigen::MatrixXcd hamiltonian_;
    std::vector<Decay> decays_;
};

/// Adjacent-decay model of the N-level chain: every excited level decays to
/// each neighbouring ground level at gamma, every ground level relaxes to each
/// existing ground neighbour (l +- 2) at gamma'. Edge levels have fewer
/// channels.
inline CouplingGraph cascade_graph(const SystemParams& params)
{
    const int n = params.n_levels();
    std::vector<Decay> decays;
    for (int m = 2; m < n; m += 2) {
        decays.push_back({m - 1, m - 2, params.gamma()});
        decays.push_back({m - 1, m, params.gamma()});
    }
    for (int l = 1; l <= n; l += 2) {
        if (l - 2 >= 1)
            decays.push_back({l - 1, l - 3, params.gamma_prime()});
        if (l + 2 <= n)
            decays.push_back({l - 1, l + 1, params.gamma_prime()});
    }
    return CouplingGraph(build_rotating_hamiltonian(params), std::move(decays));
}

/// Linear generator L acting on column-stacked density matrices.
class GeneratorMatrix {
public:
    explicit GeneratorMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix))
    {
        const auto n = matrix_.rows();
        dim_ = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
        if (matrix_.cols() != n || dim_ * dim_ != n || n == 0)
            throw ConfigError("generator must be square with a perfect-square size");
    }

    /// Size d of the density matrices it acts on.
    int states() const { return dim_; }
    /// Vectorized dimension d^2.
    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const
    {
        Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
        Eigen::VectorXcd out = matrix_ * v;
        return Eigen::Map<const Eigen::MatrixXcd>(out.data(), dim_, dim_);
    }

private:
    Eigen::MatrixXcd matrix_;
    int dim_ = 0;
};

struct DensityCheck {
    double hermiticity = 0.0;  // max |rho - rho^dagger|
    double trace_error = 0.0;  // |tr rho - 1|
    double min_eigenvalue = 0.0;
};

inline DensityCheck inspect_density(const Eigen::MatrixXcd& m)
{
    DensityCheck c;
    c.hermiticity = (m - m.adjoint()).cwiseAbs().maxCoeff();
    c.trace_error = std::abs(m.trace() - cd(1.0, 0.0));
    Eigen::MatrixXcd herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

/// Hermitian, unit-trace, positive semidefinite state. Validated on
/// construction against the given tolerances.
class DensityMatrix {
public:
    static constexpr double hermiticity_tol = 1e-12;
    static constexpr double trace_tol = 1e-12;
    static constexpr double positivity_tol = 1e-10;

    explicit DensityMatrix(Eigen::MatrixXcd m, double trace_tolerance = trace_tol)
        : m_(std::move(m))
    {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw ConfigError("density matrix must be square and non-empty");
        const auto c = inspect_density(m_);
        if (c.hermiticity > hermiticity_tol)
            throw SolverError("density matrix not Hermitian (defect " +
                              std::to_string(c.hermiticity) + ")");
        if (c.trace_error > trace_tolerance)
            throw SolverError("density matrix trace differs from 1 by " +
                              std::to_string(c.trace_error));
        if (c.min_eigenvalue < -positivity_tol)
            throw SolverError("density matrix has negative eigenvalue " +
                              std::to_string(c.min_eigenvalue));
    }

    static DensityMatrix maximally_mixed(int d)
    {
        return DensityMatrix(Eigen::MatrixXcd::Identity(d, d) / static_cast<double>(d));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    cd operator()(int i, int j) const { return m_(i, j); }
    double population(int i) const { return m_(i, i).real(); }

    /// Sub-block on the listed (0-based) states, e.g. the ground manifold.
    /// The block is not renormalized.
    Eigen::MatrixXcd block(const std::vector<int>& states) const
    {
        const auto k = static_cast<Eigen::Index>(states.size());
        Eigen::MatrixXcd out(k, k);
        for (Eigen::Index a = 0; a < k; ++a)
            for (Eigen::Index b = 0; b < k; ++b)
                out(a, b) = m_(states[a], states[b]);
        return out;
    }

private:
    Eigen::MatrixXcd m_;
};

inline GeneratorMatrix build_generator(const CouplingGraph& graph)
{
    const int d = graph.n_states();
    const int n = d * d;
    const Eigen::MatrixXcd& H = graph.hamiltonian();
    const cd minus_i(0.0, -1.0);
    Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(n, n);

    // -i (H rho - rho H)
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) {
            const int row = vec_index(i, j, d);
            for (int k = 0; k < d; ++k) {
                if (H(i, k) != 0.0)
                    L(row, vec_index(k, j, d)) += minus_i * H(i, k);
                if (H(k, j) != 0.0)
                    L(row, vec_index(i, k, d)) -= minus_i * H(k, j);
            }
        }
    }

    std::vector<double> out(static_cast<std::size_t>(d));
    for (int s = 0; s < d; ++s)
        out[s] = graph.outflow(s);
    for (int j = 0; j < d; ++j)
        for (int i = 0; i < d; ++i)
            L(vec_index(i, j, d), vec_index(i, j, d)) -= 0.5 * (out[i] + out[j]);
    for (const auto& c : graph.decays())
        L(vec_index(c.target, c.target, d), vec_index(c.source, c.source, d)) += c.rate;

    return GeneratorMatrix(std::move(L));
}

/// Numerical rank deficiency of L (dimension of its null space).
inline int null_dimension(const GeneratorMatrix& L, double relative_threshold = 1e-10)
{
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(L.matrix());
    lu.setThreshold(relative_threshold);
    return static_cast<int>(lu.dimensionOfKernel());
}

struct SteadyStateOptions {
    double residual_tol = 1e-10;   // on ||L rho|| / ||rho||
    double rank_threshold = 1e-10; // relative pivot threshold for rank decisions
};

/// Unique trace-one null vector of L.
///
/// One diagonal row of L is replaced by the trace functional and the square
/// system is solved by LU. The trace functional is a left null vector of any
/// trace-preserving L, so the replaced row carries no information. The
/// residual is checked against the unmodified L.
inline DensityMatrix steady_state(const GeneratorMatrix& L, SteadyStateOptions opt = {})
{
    const int d = L.states();
    const int n = L.dim();
    Eigen::MatrixXcd A = L.matrix();
    A.row(0).setZero();
    for (int i = 0; i < d; ++i)
        A(0, vec_index(i, i, d)) = 1.0;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    b(0) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    lu.setThreshold(opt.rank_threshold);
    if (!lu.isInvertible()) {
        const int k = null_dimension(L, opt.rank_threshold);
        throw SolverError("steady state is not unique: estimated null-space dimension " +
                          std::to_string(std::max(k, 2)));
    }
    Eigen::VectorXcd x = lu.solve(b);
    // one step of iterative refinement
    x += lu.solve(b - A * x);

    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(x.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace();

    Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(rho.data(), n);
    const double residual = (L.matrix() * v).norm();
    if (residual > opt.residual_tol * v.norm())
        throw SolverError("steady-state residual " + std::to_string(residual) +
                          " exceeds tolerance");
    return DensityMatrix(std::move(rho));
}

struct PropagateStats {
    int accepted_steps = 0;
    int rejected_steps = 0;
    double trace_drift = 0.0;
};

/// rho(t) = exp(L t) rho0 by adaptive Dormand-Prince 5(4) integration with
/// mixed absolute/relative local error control at `tol`.
inline DensityMatrix propagate(const GeneratorMatrix& L, const DensityMatrix& rho0, double t,
                               double tol, PropagateStats* stats = nullptr)
{
    if (t < 0.0)
        throw ConfigError("propagation time must be non-negative");
    if (!(tol > 0.0))
        throw ConfigError("tolerance must be positive");
    if (rho0.dim() != L.states())
        throw ConfigError("initial state dimension does not match the generator");
    if (t == 0.0)
        return rho0;

    const int n = L.dim();
    const int d = L.states();
    const Eigen::MatrixXcd& A = L.matrix();
    Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(rho0.matrix().data(), n);

    // Dormand-Prince tableau (autonomous system, so the c_i nodes are not needed)
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                     b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double norm_l = A.cwiseAbs().rowwise().sum().maxCoeff();
    double h = std::min(t, 0.1 / std::max(norm_l, 1e-300));
    double time = 0.0;
    int accepted = 0, rejected = 0;
    constexpr int max_steps = 5'000'000;

    Eigen::VectorXcd k1 = A * y, k2, k3, k4, k5, k6, k7, y_new, err;
    while (time < t) {
        if (accepted + rejected > max_steps)
            throw SolverError("propagate: step budget exhausted before reaching t");
        if (h < 1e-14 * std::max(t, 1e-300))
            throw SolverError("propagate: step size underflow");
        if (time + h > t)
            h = t - time;

        k2 = A * (y + h * (a21 * k1));
        k3 = A * (y + h * (a31 * k1 + a32 * k2));
        k4 = A * (y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        k5 = A * (y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        k6 = A * (y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = A * y_new;
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double e = 0.0;
        for (int i = 0; i < n; ++i) {
            const double sc = tol + tol * std::max(std::abs(y(i)), std::abs(y_new(i)));
            e = std::max(e, std::abs(err(i)) / sc);
        }
        if (e <= 1.0) {
            time += h;
            y = y_new;
            k1 = k7;
            ++accepted;
        } else {
            ++rejected;
        }
        const double factor = (e == 0.0) ? 5.0 : std::clamp(0.9 * std::pow(e, -0.2), 0.2, 5.0);
        h *= factor;
    }

    Eigen::MatrixXcd rho = Eigen::Map<const Eigen::MatrixXcd>(y.data(), d, d);
    const double drift = std::abs(rho.trace() - rho0.matrix().trace());
    if (stats)
        *stats = {accepted, rejected, drift};
    if (drift > 10.0 * tol)
        throw SolverError("propagate: trace drift " + std::to_string(drift) +
                          " exceeds 10*tol");
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return DensityMatrix(std::move(rho), std::max(DensityMatrix::trace_tol, 10.0 * tol));
}

/// Ground-state sub-block of an N-level chain steady state (levels 1, 3, ..., N).
inline Eigen::MatrixXcd ground_block(const DensityMatrix& rho)
{
    std::vector<int> states;
    for (int i = 0; i < rho.dim(); i += 2)
        states.push_back(i);
    return rho.block(states);
}

} // namespace cascade
