#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "cli/commands.hpp"

namespace {

int fail(const char* kind, const std::string& message, int code)
{
    cascade::cli::json j = {{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << j.dump() << "\n";
    return code;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace cascade;

    CLI::App app{"cascade: driven cascaded-Lambda chain simulator"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string config_path;
    std::map<std::string, std::string> overrides;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value configuration file");
        for (const auto& key : known_config_keys()) {
            auto* opt = sub->add_option_function<std::string>(
                "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
                "override config key '" + key + "'");
            (void)opt;
        }
    };

    auto* steady = app.add_subcommand("steady", "steady state, peaks and height ratios");
    auto* sweep_det = app.add_subcommand("sweep-detuning", "H_{n,1} versus Delta");
    auto* sweep_rabi = app.add_subcommand("sweep-rabi", "H_{n,1} versus Omega/gamma");
    auto* rb = app.add_subcommand("rb85", "16-state 85Rb model and 13-level ladder");
    auto* rates = app.add_subcommand("rates", "multi-photon transition rate table");
    auto* selftest = app.add_subcommand("selftest", "oracle-equivalence checks");
    for (auto* s : {steady, sweep_det, sweep_rabi, rb, rates})
        common(s);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (selftest->parsed())
            return cli::cmd_selftest(std::cout);

        RunConfig cfg = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
        for (const auto& [k, v] : overrides)
            cfg.set(k, v);
        cfg.validate();

        if (steady->parsed())
            return cli::cmd_steady(cfg, std::cout);
        if (sweep_det->parsed())
            return cli::cmd_sweep_detuning(cfg, std::cout);
        if (sweep_rabi->parsed())
            return cli::cmd_sweep_rabi(cfg, std::cout);
        if (rb->parsed())
            return cli::cmd_rb85(cfg, std::cout);
        if (rates->parsed())
            return cli::cmd_rates(cfg, std::cout);
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const SolverError& e) {
        return fail("solver", e.what(), 1);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
    return 0;
}
