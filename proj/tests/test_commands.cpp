#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "cli/commands.hpp"

using namespace cascade;
using namespace cascade::cli;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    explicit TempDir(const std::string& tag)
        : path_(fs::temp_directory_path() / ("cascade_test_" + tag))
    {
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string str() const { return path_.string(); }
    std::string read(const std::string& name) const
    {
        std::ifstream f(path_ / name, std::ios::binary);
        std::stringstream s;
        s << f.rdbuf();
        return s.str();
    }

private:
    fs::path path_;
};

RunConfig config(const std::string& text, const std::string& out)
{
    auto cfg = RunConfig::parse(text);
    cfg.set("out", out);
    cfg.validate();
    return cfg;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& body)
{
    std::vector<std::vector<std::string>> rows;
    std::stringstream ss(body);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ','))
            cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

int column(const std::vector<std::string>& header, const std::string& name)
{
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name)
            return static_cast<int>(k);
    return -1;
}

} // namespace

TEST(Steady, DefaultThreeLevelGivesOnePeak)
{
    TempDir dir("steady3");
    std::ostringstream out;
    EXPECT_EQ(cmd_steady(config("", dir.str()), out), 0);
    const auto body = dir.read("steady_peaks.csv");
    EXPECT_EQ(body.rfind("# config-hash: ", 0), 0u);
    const auto rows = csv_rows(body);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"n", "frequency_mhz", "weight",
                                                 "ratio_to_fundamental"}));
    EXPECT_EQ(rows[1][0], "1");
    EXPECT_EQ(rows[1][3], "1");
}

TEST(Steady, SevenLevelEffectiveRatioTable)
{
    TempDir dir("steady7");
    std::ostringstream out;
    const auto cfg = config("n_levels = 7\nmodel = effective\nformat = both\n", dir.str());
    EXPECT_EQ(cmd_steady(cfg, out), 0);
    const auto rows = csv_rows(dir.read("steady_peaks.csv"));
    ASSERT_EQ(rows.size(), 4u);

    // oracle: run the effective model directly
    const auto rho = effective_steady_state(reduce(cfg.system()));
    const auto h = height_ratios(coherence_peaks(rho.matrix(), cfg.delta_omega_s()));
    EXPECT_DOUBLE_EQ(std::stod(rows[2][3]), h(2));
    EXPECT_DOUBLE_EQ(std::stod(rows[3][3]), h(3));

    const auto j = json::parse(dir.read("steady.json"));
    EXPECT_EQ(j["peak_set"]["peaks"].size(), 3u);
    EXPECT_EQ(j["peak_set"]["peaks"][0]["contributors"].size(), 3u);
    EXPECT_EQ(j["density"]["re"].size(), 4u);
}

TEST(Steady, OutputIsDeterministic)
{
    TempDir dir("det");
    std::ostringstream out;
    const auto cfg = config("n_levels = 5\ndelta_mhz = 0.05\nformat = both\n", dir.str());
    cmd_steady(cfg, out);
    const auto csv = dir.read("steady_peaks.csv");
    const auto dens = dir.read("steady_density.csv");
    const auto js = dir.read("steady.json");
    cmd_steady(cfg, out);
    EXPECT_EQ(dir.read("steady_peaks.csv"), csv);
    EXPECT_EQ(dir.read("steady_density.csv"), dens);
    EXPECT_EQ(dir.read("steady.json"), js);
}

TEST(SweepDetuning, LorentzianCentreAndHalfWidth)
{
    TempDir dir("sweepdet");
    std::ostringstream out;
    const auto cfg = config("n_levels = 5\nsweep_start = -0.3\nsweep_stop = 0.3\n"
                            "sweep_count = 61\nparallel = 4\n",
                            dir.str());
    EXPECT_EQ(cmd_sweep_detuning(cfg, out), 0);
    const auto rows = csv_rows(dir.read("sweep_detuning.csv"));
    const int cf = column(rows[0], "H2_1_closed_form");
    const int full = column(rows[0], "H2_1_full");
    ASSERT_GE(cf, 0);
    ASSERT_GE(full, 0);
    ASSERT_GE(column(rows[0], "H2_1_effective"), 0);

    std::vector<double> x, h;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        x.push_back(std::stod(rows[r][0]));
        h.push_back(std::stod(rows[r][full]));
    }
    const auto peak = std::max_element(h.begin(), h.end()) - h.begin();
    EXPECT_NEAR(x[peak], 0.0, 1e-12);

    // half maximum on the positive side, by linear interpolation
    double half = std::nan("");
    for (std::size_t k = peak; k + 1 < h.size(); ++k)
        if (h[k] >= h[peak] / 2 && h[k + 1] < h[peak] / 2) {
            const double t = (h[k] - h[peak] / 2) / (h[k] - h[k + 1]);
            half = x[k] + t * (x[k + 1] - x[k]);
            break;
        }
    const auto p = cfg.system();
    const double expected = units::angular_to_mhz((p.gamma_prime() + 2 * p.j_o()) / 2);
    EXPECT_NEAR(half, expected, x[1] - x[0]);
}

TEST(SweepDetuning, EmptySweepIsUsageError)
{
    std::ostringstream out;
    EXPECT_THROW(cmd_sweep_detuning(config("n_levels = 5", "."), out), ConfigError);
    EXPECT_THROW(cmd_sweep_detuning(config("sweep_start = 0\nsweep_stop = 1\nsweep_count = 3",
                                           "."),
                                    out),
                 ConfigError);
}

TEST(SweepRabi, ParallelMatchesSerialAndFlagsZeroDrive)
{
    TempDir s("rabi_serial"), p("rabi_par");
    std::ostringstream out;
    const std::string text = "n_levels = 7\nsweep_start = 0\nsweep_stop = 0.01\nsweep_count = 6\n";
    auto serial = config(text, s.str());
    auto par = config(text + "parallel = 3\n", p.str());
    EXPECT_EQ(cmd_sweep_rabi(serial, out), 0);
    EXPECT_EQ(cmd_sweep_rabi(par, out), 0);
    auto body = [](std::string b) { return b.substr(b.find('\n')); };
    EXPECT_EQ(body(s.read("sweep_rabi.csv")), body(p.read("sweep_rabi.csv")));
    const auto rows = csv_rows(s.read("sweep_rabi.csv"));
    const int st = column(rows[0], "status");
    EXPECT_EQ(rows[1][st], "undriven");
    EXPECT_EQ(rows[1][column(rows[0], "H2_1_full")], "nan");
    EXPECT_EQ(rows[2][st], "ok");
}

TEST(Rb85, ZeroDriveIsFlagged)
{
    TempDir dir("rb0");
    std::ostringstream out;
    EXPECT_EQ(cmd_rb85(config("rabi_mhz = 0\ntruncated = false\n", dir.str()), out), 0);
    const auto rows = csv_rows(dir.read("rb85_fit.csv"));
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1][0], "full16");
    EXPECT_EQ(rows[1][2], "0");
    EXPECT_EQ(rows[1].back(), "undriven");
}

TEST(Rates, TableModes)
{
    TempDir dir("rates");
    std::ostringstream out;
    EXPECT_EQ(cmd_rates(config("n_levels = 9", dir.str()), out), 0);
    const auto rows = csv_rows(dir.read("rates.csv"));
    ASSERT_EQ(rows.size(), 5u);
    const int mode = column(rows[0], "mode");
    const int ratio = column(rows[0], "ratio");
    EXPECT_EQ(rows[3][mode], "detuned");
    EXPECT_EQ(rows[4][mode], "resonant-only");
    // geometric sequence
    const double q = std::stod(rows[2][ratio]) / std::stod(rows[1][ratio]);
    for (int r = 2; r <= 4; ++r)
        EXPECT_NEAR(std::stod(rows[r][ratio]) / std::stod(rows[r - 1][ratio]), q, 1e-12 * q);
}

TEST(ParallelMap, OrderedByIndexAndPropagatesErrors)
{
    const auto v = parallel_map<int>(20, 4, [](int i) { return i * i; });
    for (int i = 0; i < 20; ++i)
        EXPECT_EQ(v[i], i * i);
    EXPECT_THROW(parallel_map<int>(5, 2,
                                   [](int i) -> int {
                                       if (i == 3)
                                           throw SolverError("boom");
                                       return i;
                                   }),
                 SolverError);
}

TEST(Selftest, AllChecksPass)
{
    for (const auto& c : run_selftest())
        EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
}

#ifdef CASCADE_CLI_PATH
namespace {

int run_cli(const std::string& args, std::string* err)
{
    const std::string errfile = (fs::temp_directory_path() / "cascade_cli_err.txt").string();
    const std::string cmd = std::string(CASCADE_CLI_PATH) + " " + args + " >/dev/null 2>" + errfile;
    const int status = std::system(cmd.c_str());
    std::ifstream f(errfile);
    std::stringstream s;
    s << f.rdbuf();
    *err = s.str();
    return WEXITSTATUS(status);
}

} // namespace

TEST(Cli, ExitCodesAndErrorJson)
{
    std::string err;
    EXPECT_EQ(run_cli("steady --n_levels 4", &err), 2);
    const auto j = json::parse(err);
    EXPECT_EQ(j["error"], "config");
    EXPECT_NE(j["message"].get<std::string>().find("n_levels must be odd"), std::string::npos);
    EXPECT_EQ(run_cli("sweep-detuning --n_levels 5", &err), 2);
    EXPECT_EQ(run_cli("steady --no-such-flag", &err), 2);
    EXPECT_EQ(run_cli("steady --config /nonexistent.cfg", &err), 2);
    TempDir dir("cli_ok");
    EXPECT_EQ(run_cli("steady --out " + dir.str(), &err), 0);
}
#endif
