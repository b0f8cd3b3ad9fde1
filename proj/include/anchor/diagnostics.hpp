#ifndef ANCHOR_DIAGNOSTICS_HPP
#define ANCHOR_DIAGNOSTICS_HPP

#include "anchor/trace.hpp"
#include "anchor/types.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace anchor {

// Instrumentation over finished runs. Nothing here feeds back into solver
// control flow.

/// One-step potential for the anchored cocoercive iteration:
///   C_k = (k (k+1) / (2L)) ||F(u_k)||^2 + (k+1) <F(u_k), u_k - u0>.
double potential_cocoercive(std::int64_t k, const Vec& u_k, const Vec& u0, const Vec& f_uk,
                            double lipschitz);

/// Two-step potential with the extrapolation gap term:
///   V_k = A_k ||F(u_k)||^2 + B_k <F(u_k), u_k - u0> + c_k L^2 ||u_k - v_{k-1}||^2,
/// with B_k = (k+1) B0 and A_k = c_k = B0 (k+1)(k+2) eta_k / 2.
double potential_monotone(std::int64_t k, const Vec& u_k, const Vec& v_km1, const Vec& u0,
                          const Vec& f_uk, double eta_k, double lipschitz, double b0);

struct RateFit {
    double slope = 0.0;
    double r_squared = 0.0;
    int points = 0;
};

/// Least-squares slope of log ||F(u_k)|| against log k over k > burn_in.
/// Requires at least 20 usable records (finite positive norms).
RateFit fit_rate_exponent(const RunTrace& trace, std::int64_t burn_in);

RateFit fit_loglog(std::span<const double> x, std::span<const double> y);

struct ScalingCell {
    double eps = 0.0;
    int replication = 0;
    std::uint64_t queries = 0;
    bool failed = false;
    std::string error;
};

struct ScalingReport {
    std::vector<double> eps_grid;
    std::vector<double> mean_queries;   // aligned with eps_grid
    std::vector<ScalingCell> cells;     // one per (eps, replication)
    double fitted_exponent = 0.0;       // slope of log(queries) vs log(1/eps)
    double r_squared = 0.0;
    std::vector<std::string> failures;

    bool complete() const { return failures.empty(); }
};

/// Runs `runner` at every (eps, replication) pair, averages total query
/// counts per eps, and fits log(queries) against log(1/eps). Failed cells
/// are recorded and excluded from the fit rather than aborting the sweep.
using SolverRunner = std::function<RunTrace(double eps, Seed seed)>;
ScalingReport measure_query_scaling(const SolverRunner& runner, std::span<const double> eps_grid,
                                    int replications, Seed master, int workers = 0);

/// Deterministic worker pool over [0, count); used for sweep and comparison
/// cells. Results must be written to caller-owned slots indexed by cell.
void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body,
                  int workers = 0);

}  // namespace anchor

#endif
