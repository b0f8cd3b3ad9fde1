#ifndef ANCHOR_CLI_HPP
#define ANCHOR_CLI_HPP

#include "anchor/config.hpp"
#include "anchor/problem.hpp"
#include "anchor/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace anchor::cli {

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDivergence = 2;
inline constexpr int kExitBoundViolation = 3;
inline constexpr int kExitPartialFailure = 4;

struct Overrides {
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
};

/// Everything a command needs, resolved and validated from one config file.
struct Experiment {
    Experiment(ProblemInstance problem, Vec u0)
        : problem(std::move(problem)), u0(std::move(u0)) {}

    ProblemInstance problem;
    Vec u0;

    std::string method;
    std::vector<std::string> methods;
    std::string estimator = "page";
    double eps = 0.1;
    std::optional<double> eta0;
    std::optional<double> mu;
    std::optional<double> dist0;
    std::optional<double> lipschitz;
    double constant_scale = 1.0;
    double s1_scale = 1.0;
    std::int64_t s2_cap = 10'000'000;
    bool stop_on_estimate = false;
    std::optional<std::int64_t> max_iters;
    std::optional<std::uint64_t> budget;
    std::optional<double> step;
    std::int64_t batch = 1;
    Seed master{1};
    int replications = 0;
    std::vector<double> eps_grid;
    std::vector<std::int64_t> checkpoints{1, 2, 4, 8, 16};
    std::int64_t record_stride = 1;
    std::optional<std::int64_t> rounds;  // restarted solver round override
    int workers = 0;

    std::string out_dir = "out";
    bool want_csv = true;
    bool want_svg = true;
    bool want_json = true;
};

Experiment load_experiment(const KeyValueConfig& cfg, const Overrides& overrides);

/// Runs one named method on the experiment's problem. eps_override replaces
/// the configured eps (used by sweeps); budget_override replaces the budget.
SolveResult run_method(const Experiment& exp, const std::string& method, Seed seed,
                       std::optional<double> eps_override = std::nullopt,
                       std::optional<std::uint64_t> budget_override = std::nullopt,
                       bool keep_iterates = false);

int cmd_solve(const std::string& config_path, const Overrides& overrides, std::ostream& err);
int cmd_compare(const std::string& config_path, const Overrides& overrides, std::ostream& err);
int cmd_variance_check(const std::string& config_path, const Overrides& overrides,
                       std::ostream& err);
int cmd_sweep(const std::string& config_path, const Overrides& overrides, std::ostream& err);

}  // namespace anchor::cli

#endif
