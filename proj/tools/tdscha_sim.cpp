#include "tdscha/cli_runner.hpp"

#include <CLI11.hpp>

int main(int argc, char** argv) {
    CLI::App app{"Nonequilibrium Gaussian dynamics on quartic surfaces"};
    app.require_subcommand(0, 1);

    tdscha::CliArgs args;
    std::uint64_t seed = 0;
    bool seed_given = false;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", args.config_path, "config file (text or JSON)")
            ->required();
        cmd->add_option("--out-dir", args.out_dir, "output directory");
        cmd->add_option("--workers", args.workers, "parallel task workers");
        cmd->add_option("--seed", seed, "rng seed for seeded constructions")
            ->each([&seed_given](const std::string&) { seed_given = true; });
    };
    for (const char* name :
         {"relax", "dynamics", "scan", "minimal", "toy-build"})
        add_common(app.add_subcommand(name));

    CLI11_PARSE(app, argc, argv);
    if (app.get_subcommands().empty()) {
        std::cout << app.help();
        return 1;
    }
    args.command = app.get_subcommands().front()->get_name();
    args.seed = seed;
    args.seed_set = seed_given;
    return tdscha::run_cli(args);
}
