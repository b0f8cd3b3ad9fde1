#ifndef ANCHOR_SOLVER_HPP
#define ANCHOR_SOLVER_HPP

#include "anchor/estimator.hpp"
#include "anchor/problem.hpp"
#include "anchor/trace.hpp"

#include <optional>

namespace anchor {

/// Operator estimate fed to the iteration: the recursive variance-reduced
/// estimator, a growing mini-batch, or a single sample per step.
enum class EstimatorKind { Page, MiniBatch, SingleSample };

struct CocoerciveConfig {
    double eps = 0.1;
    std::optional<double> lipschitz;      // defaults to the problem constant
    std::optional<double> dist0;          // ||u0 - u*|| bound; exact when u* is known
    std::optional<std::int64_t> max_iters;
    std::optional<std::uint64_t> query_budget;
    bool stop_on_estimate = false;        // stop once ||F_tilde(u_k)|| <= eps
    Seed master_seed{1};
    double constant_scale = 1.0;          // scales N and the batch sizes
    std::int64_t s2_cap = 10'000'000;
    double page_s1_scale = 1.0;
    EstimatorKind estimator = EstimatorKind::Page;
    bool keep_iterates = false;
    std::int64_t record_stride = 1;  // trace every k-th iteration (final always kept)
};

struct MonotoneConfig {
    double eps = 0.1;
    std::optional<double> lipschitz;
    std::optional<double> eta0;           // defaults to 1/(3 sqrt(3) L)
    std::optional<double> dist0;
    std::optional<std::int64_t> max_iters;
    std::optional<std::uint64_t> query_budget;
    Seed master_seed{1};
    double constant_scale = 1.0;
    std::int64_t s2_cap = 10'000'000;
    double page_s1_scale = 1.0;
    EstimatorKind estimator = EstimatorKind::Page;
    bool keep_iterates = false;
    std::int64_t record_stride = 1;
};

struct SharpConfig {
    double eps = 0.1;
    std::optional<double> lipschitz;
    std::optional<double> mu;             // defaults to the problem sharpness
    std::optional<double> eta0;
    std::optional<double> dist0;
    std::optional<std::int64_t> max_rounds;
    std::optional<std::uint64_t> query_budget;
    Seed master_seed{1};
    double constant_scale = 1.0;
    std::int64_t s2_cap = 10'000'000;
    double page_s1_scale = 1.0;
    double log_base = 2.0;                // base of the round-count logarithm
    bool keep_iterates = false;
    std::int64_t record_stride = 1;
};

enum class BaselineMethod { GDA, EG, Popov, HalpernSingleSample };

struct BaselineConfig {
    double step = 0.1;
    std::int64_t batch = 1;
    std::uint64_t budget = 100000;        // stochastic queries, not iterations
    std::optional<std::int64_t> max_iters;
    Seed master_seed{1};
    bool keep_iterates = false;
    std::int64_t record_stride = 1;
};

/// Upper step-size bound for the extrapolated schemes: 1 / (3 sqrt(3) L).
double eta0_upper_bound(double lipschitz);

/// One step of the eta recurrence used by the two-step scheme, k >= 1:
///   eta_k = ((1 - 1/(k+1)^2 - M eta^2) (k+1)^2) / ((1 - M eta^2) k (k+2)) * eta.
/// Throws ScheduleCollapse when M eta^2 >= 1 - 1/(k+1)^2.
double eta_schedule(double eta_prev, std::int64_t k, double m);

/// Limit floor of the eta recurrence: eta0 (1 - 2 M eta0^2) / (1 - M eta0^2).
double eta_floor(double eta0, double m);

/// Constrained stationarity surrogate: eta * (u - proj(u - F_value / eta)).
Vec gradient_mapping(const Vec& u, const Vec& f_value, double eta, const Projection& proj);

/// Anchored one-step iteration for 1/L-cocoercive operators,
///   u_k = (1/(k+1)) u0 + (k/(k+1)) (u_{k-1} - (1/L) F_tilde(u_{k-1})),
/// driven by the recursive variance-reduced estimator.
SolveResult halpern_cocoercive(const ProblemInstance& problem, const Vec& u0,
                               const CocoerciveConfig& config);

/// Same iteration with the growing mini-batch estimate S_k = sigma^2 (k+1)/eps^2.
SolveResult halpern_cocoercive_minibatch(const ProblemInstance& problem, const Vec& u0,
                                         CocoerciveConfig config);

/// Projected variant: u_k = (1/(k+1)) u0 + (k/(k+1)) proj(u_{k-1} - F_tilde(u_{k-1})/L).
/// Requires the problem to carry a projection; progress is measured through
/// the gradient mapping G_L.
SolveResult halpern_cocoercive_constrained(const ProblemInstance& problem, const Vec& u0,
                                           const CocoerciveConfig& config);

/// Two-step extrapolated anchored iteration for monotone Lipschitz operators,
/// with the estimator tracking the leading v-sequence.
SolveResult e_halpern(const ProblemInstance& problem, const Vec& u0, const MonotoneConfig& config);

/// Restarted two-step scheme for mu-sharp operators: fixed-length inner runs,
/// each warm-started from the previous output with a fresh estimator.
SolveResult restarted_e_halpern(const ProblemInstance& problem, const Vec& u0,
                                const SharpConfig& config);

/// Budget-matched reference methods used in comparisons.
SolveResult run_baseline(BaselineMethod method, const ProblemInstance& problem, const Vec& u0,
                         const BaselineConfig& config);

BaselineMethod baseline_from_name(const std::string& name);

}  // namespace anchor

#endif
