#include "anchor/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"anchor - stochastic monotone inclusion solvers and experiments"};
    app.require_subcommand(1);

    std::string config_path;
    anchor::cli::Overrides overrides;
    std::string out_dir;
    std::uint64_t seed = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "experiment config file")->required();
        cmd->add_option("--out-dir", out_dir, "output directory override");
        cmd->add_option("--seed", seed, "master seed override");
    };

    CLI::App* solve = app.add_subcommand("solve", "run one solver and write its trace");
    CLI::App* compare =
        app.add_subcommand("compare", "run several methods under one query budget");
    CLI::App* variance =
        app.add_subcommand("variance-check", "verify the estimator variance schedule");
    CLI::App* sweep = app.add_subcommand("sweep", "fit oracle-query scaling across eps values");
    for (CLI::App* cmd : {solve, compare, variance, sweep}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);

    if (solve->count("--out-dir") || compare->count("--out-dir") ||
        variance->count("--out-dir") || sweep->count("--out-dir"))
        overrides.out_dir = out_dir;
    if (solve->count("--seed") || compare->count("--seed") || variance->count("--seed") ||
        sweep->count("--seed"))
        overrides.seed = seed;

    if (app.got_subcommand(solve))
        return anchor::cli::cmd_solve(config_path, overrides, std::cerr);
    if (app.got_subcommand(compare))
        return anchor::cli::cmd_compare(config_path, overrides, std::cerr);
    if (app.got_subcommand(variance))
        return anchor::cli::cmd_variance_check(config_path, overrides, std::cerr);
    return anchor::cli::cmd_sweep(config_path, overrides, std::cerr);
}
