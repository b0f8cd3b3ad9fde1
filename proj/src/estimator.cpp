#include "anchor/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace anchor {

namespace {

std::int64_t ceil_clamped(double x, std::int64_t lo, std::int64_t hi) {
    if (!(x < static_cast<double>(hi))) return hi;
    const double c = std::ceil(x);
    return std::max(lo, static_cast<std::int64_t>(c));
}

}  // namespace

double page_probability(std::int64_t k, PkRule rule) {
    if (k < 1) throw InvalidParameter("page_probability: k must be >= 1");
    const double kd = static_cast<double>(k);
    switch (rule) {
        case PkRule::Anchored: return 2.0 / (kd + 1.0);
        case PkRule::Extrapolated: return std::min(2.0 / kd, 1.0);
    }
    throw InvalidParameter("page_probability: unknown rule");
}

PageSchedule page_schedule(std::int64_t k, const PageSettings& settings, double dist_sq) {
    if (settings.eps <= 0.0) throw InvalidParameter("page_schedule: eps must be > 0");
    if (dist_sq < 0.0) throw InvalidParameter("page_schedule: dist_sq must be >= 0");

    PageSchedule sched;
    sched.p = page_probability(k, settings.rule);
    const double eps_sq = settings.eps * settings.eps;
    const double s1_raw = settings.scale * settings.s1_scale * 8.0 * settings.sigma *
                          settings.sigma / (sched.p * eps_sq);
    const double s2_raw = settings.scale * 8.0 * settings.lipschitz * settings.lipschitz *
                          dist_sq / (sched.p * sched.p * eps_sq);
    sched.s1 = ceil_clamped(s1_raw, 1, settings.s2_cap);
    sched.s2 = ceil_clamped(s2_raw, 1, settings.s2_cap);
    sched.s2_capped = s2_raw > static_cast<double>(settings.s2_cap);
    return sched;
}

PageState page_init(const Vec& u0, std::int64_t s1_0, const StochasticOracle& oracle,
                    RngStream rng) {
    if (s1_0 < 1) throw InvalidParameter("page_init: s1_0 must be >= 1");
    require_dim(u0, oracle.dim(), "page_init");

    Vec acc = Vec::Zero(u0.size());
    for (std::int64_t i = 0; i < s1_0; ++i) acc += oracle.evaluate(u0, rng.next_seed());

    PageState state;
    state.estimate = acc / static_cast<double>(s1_0);
    state.anchor = u0;
    state.k = 0;
    state.cumulative_queries = static_cast<std::uint64_t>(s1_0);
    state.rng = rng;
    return state;
}

PageStepResult page_step(PageState& state, const Vec& new_point, const StochasticOracle& oracle,
                         const PageSettings& settings) {
    require_dim(new_point, oracle.dim(), "page_step");

    const std::int64_t k = state.k + 1;
    const double dist_sq = (new_point - state.anchor).squaredNorm();
    PageStepResult result;
    result.schedule = page_schedule(k, settings, dist_sq);
    if (result.schedule.s2_capped) ++state.s2_cap_hits;

    result.refreshed = state.rng.bernoulli(result.schedule.p);
    if (result.refreshed) {
        Vec acc = Vec::Zero(new_point.size());
        for (std::int64_t i = 0; i < result.schedule.s1; ++i)
            acc += oracle.evaluate(new_point, state.rng.next_seed());
        result.estimate = acc / static_cast<double>(result.schedule.s1);
        result.queries_used = static_cast<std::uint64_t>(result.schedule.s1);
    } else {
        Vec acc = Vec::Zero(new_point.size());
        for (std::int64_t i = 0; i < result.schedule.s2; ++i) {
            const Seed z = state.rng.next_seed();
            acc += oracle.evaluate(new_point, z) - oracle.evaluate(state.anchor, z);
        }
        result.estimate = state.estimate + acc / static_cast<double>(result.schedule.s2);
        result.queries_used = 2 * static_cast<std::uint64_t>(result.schedule.s2);
    }

    state.estimate = result.estimate;
    state.anchor = new_point;
    state.k = k;
    state.cumulative_queries += result.queries_used;
    return result;
}

MiniBatchResult minibatch_estimate(const Vec& u, std::int64_t s, const StochasticOracle& oracle,
                                   RngStream& rng) {
    if (s < 1) throw InvalidParameter("minibatch_estimate: batch size must be >= 1");
    require_dim(u, oracle.dim(), "minibatch_estimate");

    Vec acc = Vec::Zero(u.size());
    for (std::int64_t i = 0; i < s; ++i) acc += oracle.evaluate(u, rng.next_seed());

    MiniBatchResult result;
    result.estimate = acc / static_cast<double>(s);
    result.queries_used = static_cast<std::uint64_t>(s);
    return result;
}

std::int64_t minibatch_schedule(std::int64_t k, double sigma, double eps, double scale) {
    if (eps <= 0.0) throw InvalidParameter("minibatch_schedule: eps must be > 0");
    if (k < 0) throw InvalidParameter("minibatch_schedule: k must be >= 0");
    const double raw = scale * sigma * sigma * static_cast<double>(k + 1) / (eps * eps);
    return ceil_clamped(raw, 1, std::numeric_limits<std::int64_t>::max() / 4);
}

}  // namespace anchor
