#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "clv/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"covariant Lyapunov vector toolbox"};
    app.require_subcommand(1);

    std::string config_path;
    bool list_experiments = false;
    clv::harness::CliOverrides overrides;
    std::string out_prefix, format;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "path to a JSON config file");
    run->add_flag("--list", list_experiments, "list registered experiments");
    CLI::Option* out_opt =
        run->add_option("--out", out_prefix, "output path prefix");
    CLI::Option* fmt_opt =
        run->add_option("--format", format, "csv|json")
            ->check(CLI::IsMember({"csv", "json"}));
    CLI::Option* seed_opt = run->add_option("--seed", seed, "override seed");

    std::string suite;
    CLI::App* verify =
        app.add_subcommand("verify", "run a module property suite");
    verify->add_option("suite", suite, "suite name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed()) {
        if (list_experiments) return clv::harness::list(std::cout);
        if (config_path.empty()) {
            std::cout << "usage error: missing config path (or --list)\n";
            return 2;
        }
        if (*out_opt) overrides.out = out_prefix;
        if (*fmt_opt) overrides.format = format;
        if (*seed_opt) overrides.seed = seed;
        return clv::harness::run(config_path, overrides, std::cout);
    }
    return clv::harness::verify(suite, std::cout);
}
