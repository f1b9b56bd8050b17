#pragma once

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cascade/cascade.hpp"
#include "cli/report.hpp"

namespace cascade::cli {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Results are
/// stored by index; the first exception (by index) is rethrown after join.
template <class T>
std::vector<T> parallel_map(int count, int workers, const std::function<T(int)>& fn)
{
    std::vector<std::optional<T>> slots(static_cast<std::size_t>(count));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    auto run = [&](int first, int stride) {
        for (int i = first; i < count; i += stride) {
            try {
                slots[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int k = std::clamp(workers, 1, std::max(count, 1));
    if (k == 1) {
        run(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < k; ++t)
            pool.emplace_back(run, t, k);
        for (auto& th : pool)
            th.join();
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    std::vector<T> out;
    out.reserve(slots.size());
    for (auto& s : slots)
        out.push_back(std::move(*s));
    return out;
}

/// Ground-manifold steady state of a chain, from the full or reduced model.
struct ChainSolution {
    Eigen::MatrixXcd density; // full rho (full model) or ground rho (effective)
    Eigen::MatrixXcd ground;
    std::vector<std::string> warnings;
};

inline ChainSolution solve_chain(const SystemParams& p, bool effective)
{
    if (effective) {
        const auto gen = reduce(p);
        auto rho = effective_steady_state(gen);
        return {rho.matrix(), rho.matrix(), gen.warnings()};
    }
    const auto rho = steady_state(build_generator(cascade_graph(p)));
    return {rho.matrix(), ground_block(rho), {}};
}

/// Height ratios H_{n,1}, n = 2..G-1, or NaN when the fundamental vanishes.
inline std::vector<double> ratios_or_nan(const PeakSet& peaks)
{
    std::vector<double> out(peaks.size() > 0 ? peaks.size() - 1 : 0, std::nan(""));
    if (peaks.size() == 0 || !(peaks.peaks.front().weight > 0.0))
        return out;
    const auto h = height_ratios(peaks);
    return h.ratios;
}

/// Height ratios implied by the closed-form coherences (N = 3, 5, 7).
inline std::vector<double> closed_form_height_ratios(int n_levels, double j_o, double gamma_prime,
                                                     double delta)
{
    const auto cf = closed_form_coherences(n_levels, j_o, gamma_prime, delta);
    const int g = (n_levels + 1) / 2;
    std::vector<double> w(static_cast<std::size_t>(g - 1), 0.0);
    for (const auto& [key, value] : cf.values)
        w[(key.second - key.first) / 2 - 1] += std::norm(value);
    std::vector<double> out;
    for (std::size_t k = 1; k < w.size(); ++k)
        out.push_back(w[0] > 0.0 ? w[k] / w[0] : std::nan(""));
    return out;
}

inline void emit_warnings(const std::vector<std::string>& w)
{
    for (const auto& s : w)
        std::cerr << "warning: " << s << "\n";
}

inline json config_json(const RunConfig& cfg)
{
    json j = json::object();
    for (const auto& [k, v] : cfg.values())
        j[k] = v;
    return j;
}

// ---------------------------------------------------------------------------

inline int cmd_steady(const RunConfig& cfg, std::ostream& out)
{
    const auto p = cfg.system();
    const bool effective = cfg.model() == "effective";
    const auto sol = solve_chain(p, effective);
    emit_warnings(sol.warnings);
    const auto peaks = coherence_peaks(sol.ground, p.delta_omega_s());
    const bool driven = peaks.peaks.front().weight > 0.0;

    OutputSink sink(cfg);
    sink.table("steady_peaks", peak_table(peaks, cfg.threshold(), false));
    sink.table("steady_density", complex_matrix_table(sol.density));
    if (cfg.has("linewidth_mhz") && driven)
        sink.table("steady_spectrum", broadened_table(peaks, cfg.linewidth()));

    json j;
    j["config_hash"] = sink.hash();
    j["config"] = config_json(cfg);
    j["model"] = cfg.model();
    j["n_levels"] = p.n_levels();
    j["warnings"] = sol.warnings;
    j["density"] = matrix_json(sol.density);
    j["peak_set"] = peaks_json(peaks);
    if (driven) {
        const auto h = height_ratios(peaks);
        j["height_ratios"] = {{"fundamental_weight", h.fundamental_weight}, {"ratios", h.ratios}};
    } else {
        j["height_ratios"] = nullptr;
        j["status"] = "undriven";
    }
    sink.document("steady", j);

    out << "steady (" << cfg.model() << ", N=" << p.n_levels() << "): " << peaks.size()
        << " peak(s)";
    if (!driven)
        out << ", fundamental is zero (undriven)";
    out << "\n";
    for (const auto& pk : peaks.peaks)
        out << "  n=" << pk.n << " weight=" << fmt(pk.weight) << "\n";
    return 0;
}

namespace detail {

inline std::vector<std::string> ratio_columns(int n_ratios, const std::string& suffix)
{
    std::vector<std::string> h;
    for (int k = 0; k < n_ratios; ++k)
        h.push_back("H" + std::to_string(k + 2) + "_1_" + suffix);
    return h;
}

inline SweepSpec require_sweep(const RunConfig& cfg, const char* what)
{
    auto s = cfg.sweep();
    if (!s)
        throw ConfigError(std::string(what) +
                          " needs a sweep: set sweep_start, sweep_stop and sweep_count");
    return *s;
}

inline void require_ratios(const SystemParams& p)
{
    if (p.n_levels() < 5)
        throw ConfigError("height ratios need n_levels >= 5");
}

} // namespace detail

/// Delta sweep (MHz) with the Delta_odd = Delta, Delta_even = 0 pattern.
inline int cmd_sweep_detuning(const RunConfig& cfg, std::ostream& out)
{
    const auto spec = detail::require_sweep(cfg, "sweep-detuning");
    const auto base = cfg.system();
    detail::require_ratios(base);
    const int n = base.n_levels();
    const int nr = base.n_ground() - 2;
    const bool closed = n <= 7;
    const auto xs = spec.values();

    struct Row {
        std::vector<double> full, eff, cf;
    };
    const auto rows = parallel_map<Row>(static_cast<int>(xs.size()), cfg.parallel(), [&](int i) {
        const auto p = base.with_detunings(alternating_detunings(n, units::mhz_to_angular(xs[i])));
        Row r;
        r.full = ratios_or_nan(coherence_peaks(solve_chain(p, false).ground, p.delta_omega_s()));
        r.eff = ratios_or_nan(coherence_peaks(solve_chain(p, true).ground, p.delta_omega_s()));
        if (closed)
            r.cf = closed_form_height_ratios(n, p.j_o(), p.gamma_prime(), p.detuning(1));
        return r;
    });

    Table t;
    t.header = {"delta_mhz"};
    for (const auto* s : {"full", "effective"})
        for (auto& c : detail::ratio_columns(nr, s))
            t.header.push_back(c);
    if (closed)
        for (auto& c : detail::ratio_columns(nr, "closed_form"))
            t.header.push_back(c);
    json j;
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    j["rows"] = json::array();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::vector<std::string> row = {fmt(xs[i])};
        for (double v : rows[i].full)
            row.push_back(fmt(v));
        for (double v : rows[i].eff)
            row.push_back(fmt(v));
        for (double v : rows[i].cf)
            row.push_back(fmt(v));
        t.rows.push_back(std::move(row));
        j["rows"].push_back({{"delta_mhz", xs[i]},
                             {"full", rows[i].full},
                             {"effective", rows[i].eff},
                             {"closed_form", rows[i].cf}});
    }
    OutputSink sink(cfg);
    sink.table("sweep_detuning", t);
    sink.document("sweep_detuning", j);
    out << "sweep-detuning: " << xs.size() << " points, N=" << n << "\n";
    return 0;
}

/// Omega/gamma sweep.
inline int cmd_sweep_rabi(const RunConfig& cfg, std::ostream& out)
{
    const auto spec = detail::require_sweep(cfg, "sweep-rabi");
    const auto base = cfg.system();
    detail::require_ratios(base);
    const int nr = base.n_ground() - 2;
    const auto xs = spec.values();
    for (double x : xs)
        if (x < 0.0)
            throw ConfigError("omega_over_gamma must be non-negative");

    struct Row {
        std::vector<double> full, eff;
        bool driven;
    };
    const auto rows = parallel_map<Row>(static_cast<int>(xs.size()), cfg.parallel(), [&](int i) {
        const auto p = base.with_rabi(xs[i] * base.gamma());
        Row r;
        r.full = ratios_or_nan(coherence_peaks(solve_chain(p, false).ground, p.delta_omega_s()));
        r.eff = ratios_or_nan(coherence_peaks(solve_chain(p, true).ground, p.delta_omega_s()));
        r.driven = p.rabi() > 0.0 && !std::isnan(r.full.front());
        return r;
    });

    Table t;
    t.header = {"omega_over_gamma", "j_o_over_gamma_prime"};
    for (const auto* s : {"full", "effective"})
        for (auto& c : detail::ratio_columns(nr, s))
            t.header.push_back(c);
    t.header.push_back("status");
    json j;
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    j["rows"] = json::array();
    int undriven = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double om = xs[i] * base.gamma();
        const double x = om * om / base.gamma() / base.gamma_prime();
        std::vector<std::string> row = {fmt(xs[i]), fmt(x)};
        for (double v : rows[i].full)
            row.push_back(fmt(v));
        for (double v : rows[i].eff)
            row.push_back(fmt(v));
        const char* status = rows[i].driven ? "ok" : "undriven";
        undriven += rows[i].driven ? 0 : 1;
        row.push_back(status);
        t.rows.push_back(std::move(row));
        j["rows"].push_back({{"omega_over_gamma", xs[i]},
                             {"j_o_over_gamma_prime", x},
                             {"full", rows[i].full},
                             {"effective", rows[i].eff},
                             {"status", status}});
    }
    OutputSink sink(cfg);
    sink.table("sweep_rabi", t);
    sink.document("sweep_rabi", j);
    out << "sweep-rabi: " << xs.size() << " points, N=" << base.n_levels();
    if (undriven)
        out << ", " << undriven << " undriven point(s) flagged";
    out << "\n";
    return 0;
}

struct SpectrumSummary {
    PeakSet peaks;
    int visible = 0;
    std::optional<LogLinearFit> fit;
    std::string status = "ok";
};

inline SpectrumSummary summarize(const PeakSet& peaks, double threshold)
{
    SpectrumSummary s{peaks, visible_peaks(peaks, threshold), std::nullopt, "ok"};
    if (!(peaks.peaks.front().weight > 0.0)) {
        s.status = "undriven";
        return s;
    }
    try {
        s.fit = loglinear_fit(height_ratios(peaks));
    } catch (const SolverError&) {
        s.status = "too_few_peaks_for_fit";
    }
    return s;
}

/// Ground-manifold peaks of the 16-state model.
inline PeakSet rb85_peaks(const rb85::Rb85Params& p)
{
    const auto model = rb85::build_full_model(p);
    const auto rho = steady_state(build_generator(model.graph));
    return coherence_peaks(rho.block(model.ground_states), p.delta_omega_s);
}

/// Ground-manifold peaks of the resonant 13-level ladder with the same rates.
inline PeakSet truncated13_peaks(const rb85::Rb85Params& p)
{
    const SystemParams sp(13, p.rabi, p.gamma, p.gamma_prime, std::vector<double>(12, 0.0),
                          p.delta_omega_s);
    const auto rho = steady_state(build_generator(rb85::build_truncated_13(sp)));
    return coherence_peaks(ground_block(rho), p.delta_omega_s);
}

inline int cmd_rb85(const RunConfig& cfg, std::ostream& out)
{
    const auto p = cfg.rb85();
    const double thr = cfg.threshold();
    std::vector<std::pair<std::string, SpectrumSummary>> runs;
    runs.emplace_back("full16", summarize(rb85_peaks(p), thr));
    if (cfg.truncated())
        runs.emplace_back("truncated13", summarize(truncated13_peaks(p), thr));

    OutputSink sink(cfg);
    Table fit;
    fit.header = {"model", "total_peaks", "visible_peaks", "slope", "intercept", "r_squared",
                  "status"};
    json j;
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    j["threshold"] = thr;
    for (const auto& [name, s] : runs) {
        sink.table(name == "full16" ? "rb85_peaks" : "rb85_truncated13_peaks",
                   peak_table(s.peaks, thr, true));
        if (cfg.has("linewidth_mhz") && s.status != "undriven")
            sink.table("rb85_" + name + "_spectrum", broadened_table(s.peaks, cfg.linewidth()));
        const auto nan = std::nan("");
        fit.rows.push_back({name, std::to_string(s.peaks.size()), std::to_string(s.visible),
                            fmt(s.fit ? s.fit->slope : nan), fmt(s.fit ? s.fit->intercept : nan),
                            fmt(s.fit ? s.fit->r_squared : nan), s.status});
        json jr;
        jr["peak_set"] = peaks_json(s.peaks);
        jr["visible_peaks"] = s.visible;
        jr["status"] = s.status;
        if (s.fit)
            jr["fit"] = {{"slope", s.fit->slope},
                         {"intercept", s.fit->intercept},
                         {"r_squared", s.fit->r_squared}};
        else
            jr["fit"] = nullptr;
        j[name] = std::move(jr);

        out << name << ": " << s.peaks.size() << " peaks, " << s.visible
            << " above threshold " << fmt(thr);
        if (s.fit)
            out << ", slope " << fmt(s.fit->slope) << ", r^2 " << fmt(s.fit->r_squared);
        if (s.status != "ok")
            out << " [" << s.status << "]";
        out << "\n";
    }
    sink.table("rb85_fit", fit);
    sink.document("rb85", j);
    return 0;
}

/// Transition-rate table for n = 1 .. (N-1)/2.
inline int cmd_rates(const RunConfig& cfg, std::ostream& out)
{
    const auto p = cfg.system();
    Table t;
    t.header = {"n",         "photons",         "mode",
                "amplitude", "resonance_frequency_mhz", "on_resonance",
                "amplitude_resonant", "ratio"};
    json j;
    j["config_hash"] = cfg.hash();
    j["config"] = config_json(cfg);
    j["rows"] = json::array();
    for (int n = 1; 2 * n + 1 <= p.n_levels(); ++n) {
        const auto res = resonant_amplitude(p, n);
        const double ratio = rate_ratio(p, n);
        std::vector<std::string> row = {std::to_string(n), std::to_string(2 * n)};
        json jr = {{"n", n}, {"photons", 2 * n}};
        if (n <= max_detuned_order) {
            const auto r = transition_amplitude(p, n);
            row.insert(row.end(), {"detuned", fmt(r.amplitude),
                                   fmt(units::angular_to_mhz(r.resonance_frequency)),
                                   r.resonant ? "1" : "0"});
            jr["mode"] = "detuned";
            jr["amplitude"] = r.amplitude;
            jr["on_resonance"] = r.resonant;
        } else {
            row.insert(row.end(), {"resonant-only", "",
                                   fmt(units::angular_to_mhz(res.resonance_frequency)), "1"});
            jr["mode"] = "resonant-only";
            jr["amplitude"] = nullptr;
            jr["on_resonance"] = true;
        }
        row.push_back(fmt(res.amplitude));
        row.push_back(fmt(ratio));
        jr["resonance_frequency_mhz"] = units::angular_to_mhz(res.resonance_frequency);
        jr["amplitude_resonant"] = res.amplitude;
        jr["ratio"] = ratio;
        t.rows.push_back(std::move(row));
        j["rows"].push_back(std::move(jr));
    }
    OutputSink sink(cfg);
    sink.table("rates", t);
    sink.document("rates", j);
    out << t.render(cfg.hash());
    return 0;
}

// ---------------------------------------------------------------------------
// selftest: oracle equivalences at small sizes.

struct SelfCheck {
    std::string name;
    bool pass;
    std::string detail;
};

inline std::vector<SelfCheck> run_selftest()
{
    std::vector<SelfCheck> checks;
    auto add = [&](std::string name, double value, double tol) {
        checks.push_back({std::move(name), value <= tol, fmt(value) + " <= " + fmt(tol)});
    };
    const double gamma = 1.0, gp = 1e-4;

    {
        // effective N=3 coherence against its closed form
        double worst = 0.0;
        for (double d : {-5.0, -1.0, 0.0, 0.5, 3.0}) {
            const SystemParams p(3, 1e-3, gamma, gp, alternating_detunings(3, d * gp), 1.0);
            const auto rho = effective_steady_state(reduce(p));
            const auto cf = closed_form_coherences(3, p.j_o(), gp, d * gp).values.at({1, 3});
            worst = std::max(worst, std::abs(rho(0, 1) - cf) / std::abs(cf));
        }
        add("effective N=3 vs closed form", worst, 1e-10);
    }
    {
        double worst = 0.0;
        for (double d : {-4.0, 0.0, 2.0}) {
            const SystemParams p(5, 8e-3, gamma, gp, alternating_detunings(5, d * gp), 1.0);
            const auto peaks = coherence_peaks(effective_steady_state(reduce(p)).matrix(), 1.0);
            const double h = height_ratios(peaks)(2);
            const double cf = closed_form_h21_n5(p.j_o(), gp, d * gp);
            worst = std::max(worst, std::abs(h - cf) / cf);
        }
        add("effective N=5 H21 vs closed form", worst, 1e-8);
    }
    {
        const SystemParams p(3, 1e-3, gamma, 1e-6, alternating_detunings(3, 2e-6), 1.0);
        const auto full = steady_state(build_generator(cascade_graph(p)));
        const auto cf = closed_form_coherences(3, p.j_o(), 1e-6, 2e-6).values.at({1, 3});
        add("full N=3 vs closed form", std::abs(full(0, 2) - cf) / std::abs(cf), 1e-2);
    }
    {
        double worst = 0.0;
        const SystemParams p(7, 3e-3, gamma, gp, std::vector<double>(6, 0.0), 0.5);
        for (int n = 1; n <= 3; ++n) {
            const double a = transition_amplitude(p, n).amplitude;
            const double b = resonant_amplitude(p, n).amplitude;
            worst = std::max(worst, std::abs(a - b) / b);
        }
        add("resonant rates W1..W3", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int me = -4; me <= 4; ++me) {
            double s = 0.0;
            for (int q = -1; q <= 1; ++q)
                if (std::abs(me - q) <= 3)
                    s += rb85::cg_weight(3, me - q, q, 4, me);
            worst = std::max(worst, std::abs(s - 1.0));
        }
        add("F'=4 branching sums", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (int n : {3, 5, 7, 13}) {
            const SystemParams p(n, 0.01, gamma, gp, std::vector<double>(n - 1, 0.0), 1.0);
            worst = std::max(worst, anti_pt_defect(reduce(p)));
        }
        add("anti-PT defect of V_eff", worst, 1e-14);
    }
    {
        double worst = 0.0;
        for (int n : {3, 5, 7}) {
            const SystemParams p(n, 1e-4, gamma, 0.02, std::vector<double>(n - 1, 0.0), 1.0);
            const auto rho = steady_state(build_generator(cascade_graph(p)));
            for (int l = 0; l < n; l += 2)
                worst = std::max(worst, std::abs(rho.population(l) - 2.0 / (n + 1)));
        }
        add("uniform ground populations", worst, 1e-8);
    }
    {
        const SystemParams p(3, 0.5, gamma, 0.3, alternating_detunings(3, 0.2), 1.0);
        const auto L = build_generator(cascade_graph(p));
        const auto ss = steady_state(L);
        const auto rt = propagate(L, DensityMatrix::maximally_mixed(3), 200.0, 1e-10);
        add("propagate vs steady state", (rt.matrix() - ss.matrix()).cwiseAbs().maxCoeff(), 1e-6);
    }
    return checks;
}

inline int cmd_selftest(std::ostream& out)
{
    const auto checks = run_selftest();
    int failed = 0;
    for (const auto& c : checks) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << "\n";
        failed += c.pass ? 0 : 1;
    }
    out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

} // namespace cascade::cli
