#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cascade/error.hpp"

// Coherent part of the ground-manifold power spectrum. Peak n sits at
// n * dw_s and carries weight sum_l |rho_{l,l+n}|^2 over ground positions l
// (ground levels l and l+2n in chain labels). Broadening is presentation
// only and never feeds back into weights or ratios.

namespace cascade {

struct PeakContribution {
    int l;         // 1-based label of the lower ground level (odd for chains)
    double weight; // |rho_{l, l+2n}|^2
};

struct Peak {
    int n = 0;
    double frequency = 0.0;
    double weight = 0.0;
    std::vector<PeakContribution> contributors;
};

struct PeakSet {
    double delta_omega_s = 0.0;
    std::vector<Peak> peaks;

    const Peak& harmonic(int n) const { return peaks.at(static_cast<std::size_t>(n - 1)); }
    std::size_t size() const { return peaks.size(); }
};

struct HeightRatios {
    double fundamental_weight = 0.0;
    std::vector<double> ratios; // H_{n,1} for n = 2, 3, ...

    /// H_{n,1}; H_{1,1} = 1.
    double operator()(int n) const
    {
        return n == 1 ? 1.0 : ratios.at(static_cast<std::size_t>(n - 2));
    }
};

/// Peaks of a ground-manifold density matrix whose rows/columns are the
/// ground levels in ladder order (position a <-> chain label 2a + 1).
inline PeakSet coherence_peaks(const Eigen::MatrixXcd& ground_rho, double delta_omega_s)
{
    if (ground_rho.rows() != ground_rho.cols())
        throw ConfigError("ground density matrix must be square");
    const int g = static_cast<int>(ground_rho.rows());
    if (g < 2)
        throw ConfigError("need at least two ground levels for a coherence spectrum");
    PeakSet ps;
    ps.delta_omega_s = delta_omega_s;
    for (int n = 1; n < g; ++n) {
        Peak p;
        p.n = n;
        p.frequency = n * delta_omega_s;
        for (int a = 0; a + n < g; ++a) {
            const double w = std::norm(ground_rho(a + n, a));
            p.contributors.push_back({2 * a + 1, w});
            p.weight += w;
        }
        ps.peaks.push_back(std::move(p));
    }
    return ps;
}

inline HeightRatios height_ratios(const PeakSet& peaks)
{
    if (peaks.peaks.empty() || !(peaks.peaks.front().weight > 0.0))
        throw SolverError("fundamental peak has zero weight (undriven system)");
    HeightRatios h;
    h.fundamental_weight = peaks.peaks.front().weight;
    for (std::size_t k = 1; k < peaks.peaks.size(); ++k)
        h.ratios.push_back(peaks.peaks[k].weight / h.fundamental_weight);
    return h;
}

struct LogLinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Least-squares line through (n, ln weight_n) over all peaks with positive
/// weight.
inline LogLinearFit loglinear_fit(const HeightRatios& h)
{
    std::vector<double> xs, ys;
    const std::size_t total = h.ratios.size() + 1;
    for (std::size_t k = 0; k < total; ++k) {
        const double ratio = (k == 0) ? 1.0 : h.ratios[k - 1];
        const double w = ratio * h.fundamental_weight;
        if (w > 0.0 && std::isfinite(std::log(w))) {
            xs.push_back(static_cast<double>(k + 1));
            ys.push_back(std::log(w));
        }
    }
    if (xs.size() < 3)
        throw SolverError("log-linear fit needs at least 3 non-zero peaks");
    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LogLinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (f.intercept + f.slope * xs[i]);
        ss_res += r * r;
    }
    f.r_squared = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
    return f;
}

/// Number of peaks whose weight is at least `threshold` times the fundamental.
inline int visible_peaks(const PeakSet& peaks, double threshold)
{
    if (peaks.peaks.empty() || !(peaks.peaks.front().weight > 0.0))
        return 0;
    const double ref = peaks.peaks.front().weight;
    int count = 0;
    for (const auto& p : peaks.peaks)
        if (p.weight >= threshold * ref)
            ++count;
    return count;
}

/// Sum of unit-area Lorentzians (FWHM = linewidth) scaled by peak weights.
/// The value at an isolated peak centre is weight / (pi * linewidth / 2).
inline std::vector<double> broadened_spectrum(const PeakSet& peaks, double linewidth,
                                              std::span<const double> grid)
{
    if (!(linewidth > 0.0))
        throw ConfigError("linewidth must be positive");
    if (grid.empty())
        throw ConfigError("frequency grid is empty");
    const double hw = 0.5 * linewidth;
    std::vector<double> out(grid.size(), 0.0);
    for (const auto& p : peaks.peaks) {
        if (p.weight == 0.0)
            continue;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double x = grid[k] - p.frequency;
            out[k] += p.weight * hw / (std::numbers::pi * (x * x + hw * hw));
        }
    }
    return out;
}

} // namespace cascade
