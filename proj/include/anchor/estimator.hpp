#ifndef ANCHOR_ESTIMATOR_HPP
#define ANCHOR_ESTIMATOR_HPP

#include "anchor/oracle.hpp"
#include "anchor/rng.hpp"
#include "anchor/types.hpp"

#include <cstdint>

namespace anchor {

/// Step-probability convention for the recursive estimator. The one-step
/// anchored solver drives it with p_k = 2/(k+1); the extrapolated two-step
/// solver with p_k = min(2/k, 1). Both give p_1 = 1.
enum class PkRule { Anchored, Extrapolated };

double page_probability(std::int64_t k, PkRule rule);

struct PageSchedule {
    double p = 1.0;
    std::int64_t s1 = 1;
    std::int64_t s2 = 1;
    bool s2_capped = false;
};

struct PageSettings {
    double eps = 0.1;                     // target error driving the batch sizes
    double sigma = 0.0;
    double lipschitz = 1.0;
    PkRule rule = PkRule::Anchored;
    std::int64_t s2_cap = 10'000'000;     // hard allocation guard; batches are random
    double scale = 1.0;                   // experiment-scale multiplier on S1, S2
    double s1_scale = 1.0;                // diagnostic knob, scales S1 only
};

/// Batch sizes for estimator step k >= 1, keyed to the squared distance
/// between the two most recent query points:
///   S1 = ceil(8 sigma^2 / (p eps^2)),  S2 = ceil(8 L^2 dist_sq / (p^2 eps^2)),
/// both clamped to at least one sample.
PageSchedule page_schedule(std::int64_t k, const PageSettings& settings, double dist_sq);

/// State of the recursive variance-reduced estimator: the current estimate,
/// the point it was formed at, the step counter, and the random stream that
/// drives branch coins and sample seeds.
struct PageState {
    Vec estimate;
    Vec anchor;
    std::int64_t k = 0;
    std::uint64_t cumulative_queries = 0;
    RngStream rng{Seed{0}};
    std::int64_t s2_cap_hits = 0;
};

/// Initializes the estimate with the average of s1_0 independent samples at
/// u0; k starts at zero.
PageState page_init(const Vec& u0, std::int64_t s1_0, const StochasticOracle& oracle,
                    RngStream rng);

struct PageStepResult {
    Vec estimate;
    std::uint64_t queries_used = 0;
    PageSchedule schedule;
    bool refreshed = false;
};

/// One estimator step at new_point. With probability p_k the estimate is
/// refreshed from S1 fresh samples; otherwise it is corrected by the average
/// same-seed difference between new_point and the previous anchor over S2
/// seed pairs (each pair costs two queries). Advances k and the anchor.
PageStepResult page_step(PageState& state, const Vec& new_point, const StochasticOracle& oracle,
                         const PageSettings& settings);

struct MiniBatchResult {
    Vec estimate;
    std::uint64_t queries_used = 0;
};

/// Plain average of s independent samples at u.
MiniBatchResult minibatch_estimate(const Vec& u, std::int64_t s, const StochasticOracle& oracle,
                                   RngStream& rng);

/// Mini-batch size S_k = ceil(sigma^2 (k+1) / eps^2), clamped to >= 1.
std::int64_t minibatch_schedule(std::int64_t k, double sigma, double eps, double scale = 1.0);

}  // namespace anchor

#endif
