#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ergopt/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"ergopt: ergodic optimization lab for analytic expanding circle maps"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::string lambda_text;
    std::uint64_t seed = 0;
    int p_max = 0;
    int grid = 0;
    double epsilon = 0.0;

    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "override the master seed");
    auto* pmax_opt = app.add_option("--p-max", p_max, "override enumeration depth");
    auto* grid_opt = app.add_option("--grid", grid, "override sub-action grid size");
    auto* eps_opt = app.add_option("--epsilon", epsilon, "override level-set epsilon");
    auto* lambda_opt =
        app.add_option("--lambda", lambda_text, "override lambda (a or a+bi)");

    const std::vector<std::string> commands = {
        "beta",       "subaction", "levelset",  "entropy",
        "hfam",       "transversality", "cohomology", "linearize",
        "fourier",    "lyapunov",  "iterate-check", "selftest"};
    for (const auto& name : commands)
        app.add_subcommand(name)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        ergopt::RunConfig cfg;
        if (!config_path.empty()) cfg = ergopt::parse_config(config_path);
        if (seed_opt->count()) cfg.seed = seed;
        if (pmax_opt->count()) cfg.p_max = p_max;
        if (grid_opt->count()) cfg.grid_subaction = grid;
        if (eps_opt->count()) cfg.epsilon = epsilon;
        if (lambda_opt->count())
            cfg.lambda = ergopt::detail::parse_complex(lambda_text, 0);
        ergopt::validate_config(cfg);

        const std::string command = app.get_subcommands().front()->get_name();
        return ergopt::cli::dispatch(command, cfg, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
