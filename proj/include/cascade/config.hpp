#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cascade/error.hpp"
#include "cascade/level_system.hpp"
#include "cascade/rb85.hpp"
#include "cascade/units.hpp"

// Flat key-value run configuration.
//
//   # comment
//   n_levels = 5
//   gamma_mhz = 1900
//   detunings_mhz = 0.1, 0, 0.1, 0
//
// Frequencies in the file are ordinary frequencies in MHz; they are converted
// to angular units exactly once, in the accessors below. Command-line flags
// override file keys by name.

namespace cascade {

enum class Spacing { linear, log };

struct SweepSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    Spacing spacing = Spacing::linear;

    std::vector<double> values() const
    {
        std::vector<double> v(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const double t = static_cast<double>(k) / (count - 1);
            if (spacing == Spacing::linear)
                v[k] = start + t * (stop - start);
            else
                v[k] = std::exp(std::log(start) + t * (std::log(stop) - std::log(start)));
        }
        v.front() = start;
        v.back() = stop;
        return v;
    }
};

namespace config_detail {

inline std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    double v = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v))
        throw ConfigError("key '" + key + "': '" + t + "' is not a finite number");
    return v;
}

inline long long to_integer(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw ConfigError("key '" + key + "': '" + t + "' is not an integer");
    return v;
}

inline std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty())
            out.push_back(to_double(key, item));
    return out;
}

} // namespace config_detail

/// Every key the configuration understands.
inline const std::vector<std::string>& known_config_keys()
{
    static const std::vector<std::string> keys = {
        "n_levels",        "rabi_mhz",          "rabi_over_gamma",      "gamma_mhz",
        "gamma_prime_mhz", "detunings_mhz",     "delta_mhz",            "delta_omega_s_mhz",
        "model",           "sweep_start",       "sweep_stop",           "sweep_count",
        "sweep_spacing",   "threshold",         "out",                  "format",
        "parallel",        "seed",              "ground_splitting_mhz", "excited_splitting_mhz",
        "optical_detuning_mhz", "offset_branch", "truncated",          "linewidth_mhz",
    };
    return keys;
}

class RunConfig {
public:
    RunConfig() = default;

    /// Parse configuration text. Unknown keys and malformed lines are errors.
    static RunConfig parse(std::string_view text)
    {
        RunConfig cfg;
        std::stringstream ss{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            const std::string t = config_detail::trim(line);
            if (t.empty())
                continue;
            const auto eq = t.find_first_of("=:");
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
            cfg.set(config_detail::trim(t.substr(0, eq)), config_detail::trim(t.substr(eq + 1)));
        }
        cfg.validate();
        return cfg;
    }

    static RunConfig load(const std::string& path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    /// Set or override one key. Call validate() after a batch of overrides.
    void set(const std::string& key, const std::string& value)
    {
        const auto& keys = known_config_keys();
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            throw ConfigError("unknown config key '" + key + "'");
        values_[key] = value;
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::map<std::string, std::string>& values() const { return values_; }

    /// Checks every value that is present and the cross-key invariants.
    void validate() const
    {
        (void)n_levels();
        (void)gamma();
        (void)gamma_prime();
        (void)delta_omega_s();
        (void)threshold();
        (void)parallel();
        (void)seed();
        (void)model();
        (void)formats();
        (void)offset_on_sigma_plus();
        (void)truncated();
        if (has("rabi_mhz") && has("rabi_over_gamma"))
            throw ConfigError("give either rabi_mhz or rabi_over_gamma, not both");
        (void)rabi();
        if (has("detunings_mhz") && has("delta_mhz"))
            throw ConfigError("give either detunings_mhz or delta_mhz, not both");
        (void)detunings();
        if (has("linewidth_mhz") && !(linewidth() > 0.0))
            throw ConfigError("linewidth_mhz must be positive");
        (void)sweep();
    }

    int n_levels() const
    {
        const auto n = integer("n_levels", 3);
        if (n < 3 || n % 2 == 0)
            throw ConfigError("n_levels must be odd and >= 3");
        return static_cast<int>(n);
    }
    double gamma() const { return positive("gamma_mhz", 1900.0); }
    double gamma_prime() const { return positive("gamma_prime_mhz", 0.2); }
    double delta_omega_s() const { return positive("delta_omega_s_mhz", 2.34); }

    /// Omega, from rabi_mhz or rabi_over_gamma (default 8e-3 gamma).
    double rabi() const
    {
        double r;
        if (has("rabi_mhz"))
            r = units::mhz_to_angular(number("rabi_mhz", 0.0));
        else
            r = number("rabi_over_gamma", 8e-3) * gamma();
        if (!(r >= 0.0))
            throw ConfigError("rabi frequency must be non-negative");
        return r;
    }

    /// Delta_m; either explicit or the equal-splitting pattern from delta_mhz.
    std::vector<double> detunings() const
    {
        const int n = n_levels();
        if (has("detunings_mhz")) {
            auto list = config_detail::to_list("detunings_mhz", values_.at("detunings_mhz"));
            if (static_cast<int>(list.size()) != n - 1)
                throw ConfigError("detunings_mhz needs " + std::to_string(n - 1) + " entries");
            for (auto& d : list)
                d = units::mhz_to_angular(d);
            return list;
        }
        return alternating_detunings(n, units::mhz_to_angular(number("delta_mhz", 0.0)));
    }

    SystemParams system() const
    {
        return SystemParams(n_levels(), rabi(), gamma(), gamma_prime(), detunings(), delta_omega_s());
    }

    rb85::Rb85Params rb85() const
    {
        rb85::Rb85Params p;
        p.gamma = gamma();
        p.gamma_prime = gamma_prime();
        p.rabi = rabi();
        p.delta_omega_s = delta_omega_s();
        p.ground_splitting = units::mhz_to_angular(number("ground_splitting_mhz", 2.34));
        p.excited_splitting = units::mhz_to_angular(number("excited_splitting_mhz", 2.34));
        p.optical_detuning = units::mhz_to_angular(number("optical_detuning_mhz", 0.0));
        p.offset_on_sigma_plus = offset_on_sigma_plus();
        return p;
    }

    std::string model() const
    {
        const auto m = text("model", "full");
        if (m != "full" && m != "effective")
            throw ConfigError("model must be 'full' or 'effective'");
        return m;
    }

    bool offset_on_sigma_plus() const
    {
        const auto b = text("offset_branch", "sigma_plus");
        if (b != "sigma_plus" && b != "pi")
            throw ConfigError("offset_branch must be 'sigma_plus' or 'pi'");
        return b == "sigma_plus";
    }

    bool truncated() const
    {
        const auto t = text("truncated", "true");
        if (t != "true" && t != "false")
            throw ConfigError("truncated must be 'true' or 'false'");
        return t == "true";
    }

    std::optional<SweepSpec> sweep() const
    {
        const bool any = has("sweep_start") || has("sweep_stop") || has("sweep_count");
        if (!any)
            return std::nullopt;
        if (!has("sweep_start") || !has("sweep_stop") || !has("sweep_count"))
            throw ConfigError("a sweep needs sweep_start, sweep_stop and sweep_count");
        SweepSpec s;
        s.start = number("sweep_start", 0.0);
        s.stop = number("sweep_stop", 0.0);
        const auto count = integer("sweep_count", 0);
        if (count < 2)
            throw ConfigError("sweep_count must be >= 2");
        s.count = static_cast<int>(count);
        const auto sp = text("sweep_spacing", "linear");
        if (sp == "linear")
            s.spacing = Spacing::linear;
        else if (sp == "log")
            s.spacing = Spacing::log;
        else
            throw ConfigError("sweep_spacing must be 'linear' or 'log'");
        if (s.spacing == Spacing::log && !(s.start > 0.0 && s.stop > 0.0))
            throw ConfigError("log spacing needs positive sweep endpoints");
        return s;
    }

    double threshold() const
    {
        const double t = number("threshold", 1e-5);
        if (!(t >= 0.0))
            throw ConfigError("threshold must be non-negative");
        return t;
    }
    double linewidth() const { return units::mhz_to_angular(number("linewidth_mhz", 0.0)); }
    std::string out_dir() const { return text("out", "."); }

    /// Output formats: {csv}, {json} or both.
    std::pair<bool, bool> formats() const
    {
        const auto f = text("format", "csv");
        if (f == "csv")
            return {true, false};
        if (f == "json")
            return {false, true};
        if (f == "both")
            return {true, true};
        throw ConfigError("format must be csv, json or both");
    }

    int parallel() const
    {
        const auto p = integer("parallel", 1);
        if (p < 1)
            throw ConfigError("parallel must be >= 1");
        return static_cast<int>(p);
    }
    std::uint64_t seed() const { return static_cast<std::uint64_t>(integer("seed", 12345)); }

    /// Sorted key=value lines of the explicitly set keys.
    std::string canonical_text() const
    {
        std::string out;
        for (const auto& [k, v] : values_)
            out += k + "=" + v + "\n";
        return out;
    }

    /// 64-bit FNV-1a hash of canonical_text(), as 16 hex digits.
    std::string hash() const
    {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : canonical_text()) {
            h ^= c;
            h *= 1099511628211ull;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    std::string text(const std::string& key, const std::string& fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }
    double number(const std::string& key, double fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : config_detail::to_double(key, it->second);
    }
    long long integer(const std::string& key, long long fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : config_detail::to_integer(key, it->second);
    }
    double positive(const std::string& key, double fallback) const
    {
        const double v = number(key, fallback);
        if (!(v > 0.0))
            throw ConfigError(key + " must be positive");
        return units::mhz_to_angular(v);
    }

    std::map<std::string, std::string> values_;
};

} // namespace cascade
