#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "cascade/config.hpp"
#include "cascade/error.hpp"
#include "cascade/spectrum.hpp"
#include "cascade/units.hpp"

namespace cascade::cli {

using json = nlohmann::ordered_json;

/// Fixed 17-significant-digit rendering; NaN prints as "nan".
inline std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// A CSV table: one header line, then rows. Cells are preformatted strings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string render(const std::string& config_hash) const
    {
        std::string out = "# config-hash: " + config_hash + "\n";
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t k = 0; k < cells.size(); ++k) {
                if (k)
                    out += ',';
                out += cells[k];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows)
            line(r);
        return out;
    }
};

class OutputSink {
public:
    explicit OutputSink(const RunConfig& cfg)
        : dir_(cfg.out_dir()), hash_(cfg.hash()), csv_(cfg.formats().first),
          json_(cfg.formats().second)
    {
    }

    bool csv() const { return csv_; }
    bool json_enabled() const { return json_; }
    const std::string& hash() const { return hash_; }

    void table(const std::string& stem, const Table& t) const
    {
        if (csv_)
            write(stem + ".csv", t.render(hash_));
    }

    void document(const std::string& stem, const json& j) const
    {
        if (json_)
            write(stem + ".json", j.dump(2) + "\n");
    }

    std::vector<std::string> written() const { return written_; }

private:
    void write(const std::string& name, const std::string& body) const
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        const auto path = std::filesystem::path(dir_) / name;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write output file '" + path.string() + "'");
        f << body;
        written_.push_back(path.string());
    }

    std::string dir_;
    std::string hash_;
    bool csv_;
    bool json_;
    mutable std::vector<std::string> written_;
};

/// Peak table: n, frequency_mhz, weight, ratio_to_fundamental[, visible].
inline Table peak_table(const PeakSet& peaks, double threshold, bool with_visibility)
{
    Table t;
    t.header = {"n", "frequency_mhz", "weight", "ratio_to_fundamental"};
    if (with_visibility)
        t.header.push_back("visible");
    const double ref = peaks.peaks.empty() ? 0.0 : peaks.peaks.front().weight;
    for (const auto& p : peaks.peaks) {
        const double ratio = ref > 0.0 ? p.weight / ref : std::nan("");
        std::vector<std::string> row = {std::to_string(p.n),
                                        fmt(units::angular_to_mhz(p.frequency)), fmt(p.weight),
                                        fmt(ratio)};
        if (with_visibility)
            row.push_back(ref > 0.0 && p.weight >= threshold * ref ? "1" : "0");
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline json peaks_json(const PeakSet& peaks)
{
    json j;
    j["delta_omega_s_mhz"] = units::angular_to_mhz(peaks.delta_omega_s);
    j["peaks"] = json::array();
    const double ref = peaks.peaks.empty() ? 0.0 : peaks.peaks.front().weight;
    for (const auto& p : peaks.peaks) {
        json jp;
        jp["n"] = p.n;
        jp["frequency_mhz"] = units::angular_to_mhz(p.frequency);
        jp["weight"] = p.weight;
        if (ref > 0.0)
            jp["ratio_to_fundamental"] = p.weight / ref;
        else
            jp["ratio_to_fundamental"] = nullptr;
        jp["contributors"] = json::array();
        for (const auto& c : p.contributors)
            jp["contributors"].push_back({{"l", c.l}, {"l_prime", c.l + 2 * p.n}, {"weight", c.weight}});
        j["peaks"].push_back(std::move(jp));
    }
    return j;
}

inline json matrix_json(const Eigen::MatrixXcd& m)
{
    json re = json::array(), im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array(), c = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            r.push_back(m(i, k).real());
            c.push_back(m(i, k).imag());
        }
        re.push_back(std::move(r));
        im.push_back(std::move(c));
    }
    return {{"re", re}, {"im", im}};
}

/// Complex matrix as CSV: one row per matrix row, columns re(0), im(0),
/// re(1), im(1), ...
inline Table complex_matrix_table(const Eigen::MatrixXcd& m)
{
    Table t;
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
        t.header.push_back("re_" + std::to_string(k));
        t.header.push_back("im_" + std::to_string(k));
    }
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<std::string> row;
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            row.push_back(fmt(m(i, k).real()));
            row.push_back(fmt(m(i, k).imag()));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

/// Lorentzian-broadened spectrum on a grid from 0 to (peaks + 1) dw_s.
inline Table broadened_table(const PeakSet& peaks, double linewidth, int points = 2001)
{
    const double top = (static_cast<double>(peaks.size()) + 1.0) * peaks.delta_omega_s;
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k)
        grid[k] = top * k / (points - 1);
    const auto s = broadened_spectrum(peaks, linewidth, grid);
    Table t;
    t.header = {"frequency_mhz", "power"};
    for (int k = 0; k < points; ++k)
        t.rows.push_back({fmt(units::angular_to_mhz(grid[k])), fmt(s[k])});
    return t;
}

} // namespace cascade::cli
