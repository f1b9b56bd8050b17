#include <gtest/gtest.h>

#include "cascade/config.hpp"

using namespace cascade;

TEST(Config, ParsesKeysCommentsAndLists)
{
    const auto cfg = RunConfig::parse(R"(
# five-level chain
n_levels = 5
gamma_mhz = 1900       # natural width
gamma_prime_mhz: 0.2
rabi_over_gamma = 8e-3
detunings_mhz = 0.1, 0, 0.1, 0
format = both
)");
    EXPECT_EQ(cfg.n_levels(), 5);
    EXPECT_DOUBLE_EQ(cfg.gamma(), units::mhz_to_angular(1900.0));
    EXPECT_DOUBLE_EQ(cfg.rabi(), 8e-3 * cfg.gamma());
    const auto d = cfg.detunings();
    ASSERT_EQ(d.size(), 4u);
    EXPECT_DOUBLE_EQ(d[0], units::mhz_to_angular(0.1));
    EXPECT_EQ(d[1], 0.0);
    EXPECT_TRUE(cfg.formats().first);
    EXPECT_TRUE(cfg.formats().second);
    EXPECT_EQ(cfg.system().n_levels(), 5);
}

TEST(Config, Defaults)
{
    const RunConfig cfg;
    EXPECT_EQ(cfg.n_levels(), 3);
    EXPECT_DOUBLE_EQ(cfg.threshold(), 1e-5);
    EXPECT_EQ(cfg.model(), "full");
    EXPECT_FALSE(cfg.sweep().has_value());
    EXPECT_EQ(cfg.parallel(), 1);
    EXPECT_EQ(cfg.detunings(), (std::vector<double>{0.0, 0.0}));
}

TEST(Config, Errors)
{
    EXPECT_THROW(RunConfig::parse("n_levels = 4"), ConfigError);
    EXPECT_THROW(RunConfig::parse("bogus = 1"), ConfigError);
    EXPECT_THROW(RunConfig::parse("n_levels"), ConfigError);
    EXPECT_THROW(RunConfig::parse("gamma_mhz = -1"), ConfigError);
    EXPECT_THROW(RunConfig::parse("gamma_mhz = abc"), ConfigError);
    EXPECT_THROW(RunConfig::parse("n_levels = 3.5"), ConfigError);
    EXPECT_THROW(RunConfig::parse("n_levels = 5\ndetunings_mhz = 1, 2"), ConfigError);
    EXPECT_THROW(RunConfig::parse("rabi_mhz = 1\nrabi_over_gamma = 0.1"), ConfigError);
    EXPECT_THROW(RunConfig::parse("delta_mhz = 1\ndetunings_mhz = 1, 2"), ConfigError);
    EXPECT_THROW(RunConfig::parse("model = quantum"), ConfigError);
    EXPECT_THROW(RunConfig::parse("format = xml"), ConfigError);
    EXPECT_THROW(RunConfig::parse("parallel = 0"), ConfigError);
    EXPECT_THROW(RunConfig::parse("offset_branch = sigma_minus"), ConfigError);
    EXPECT_THROW(RunConfig::load("/nonexistent/file.cfg"), ConfigError);
}

TEST(Config, SweepValidation)
{
    EXPECT_THROW(RunConfig::parse("sweep_start = 0\nsweep_stop = 1"), ConfigError);
    EXPECT_THROW(RunConfig::parse("sweep_start = 0\nsweep_stop = 1\nsweep_count = 1"), ConfigError);
    EXPECT_THROW(RunConfig::parse("sweep_start = 0\nsweep_stop = 1\nsweep_count = 5\n"
                                  "sweep_spacing = log"),
                 ConfigError);
    EXPECT_THROW(RunConfig::parse("sweep_start = 0\nsweep_stop = 1\nsweep_count = 5\n"
                                  "sweep_spacing = cubic"),
                 ConfigError);
    const auto lin = RunConfig::parse("sweep_start = -1\nsweep_stop = 1\nsweep_count = 5").sweep();
    ASSERT_TRUE(lin);
    EXPECT_EQ(lin->values(), (std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0}));
    const auto lg = RunConfig::parse("sweep_start = 1e-4\nsweep_stop = 1e-2\nsweep_count = 3\n"
                                     "sweep_spacing = log")
                        .sweep();
    ASSERT_TRUE(lg);
    EXPECT_DOUBLE_EQ(lg->values()[0], 1e-4);
    EXPECT_NEAR(lg->values()[1], 1e-3, 1e-18);
    EXPECT_DOUBLE_EQ(lg->values()[2], 1e-2);
}

TEST(Config, HashIsCanonical)
{
    const auto a = RunConfig::parse("n_levels = 5\ngamma_mhz = 1900\n");
    const auto b = RunConfig::parse("# reordered\ngamma_mhz=1900\n\nn_levels =5");
    const auto c = RunConfig::parse("n_levels = 7\ngamma_mhz = 1900\n");
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_NE(a.hash(), c.hash());
    EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, OverridesReplaceFileValues)
{
    auto cfg = RunConfig::parse("n_levels = 5");
    cfg.set("n_levels", "7");
    cfg.validate();
    EXPECT_EQ(cfg.n_levels(), 7);
    EXPECT_THROW(cfg.set("nope", "1"), ConfigError);
}

TEST(Config, Rb85Parameters)
{
    const auto cfg = RunConfig::parse("ground_splitting_mhz = 1.5\noffset_branch = pi\n");
    const auto p = cfg.rb85();
    EXPECT_DOUBLE_EQ(p.ground_splitting, units::mhz_to_angular(1.5));
    EXPECT_FALSE(p.offset_on_sigma_plus);
    EXPECT_DOUBLE_EQ(p.rabi, 8e-3 * p.gamma);
}
