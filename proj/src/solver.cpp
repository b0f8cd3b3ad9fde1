#include "anchor/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace anchor {

namespace {

constexpr std::uint64_t kEstimatorStream = 1;
constexpr std::uint64_t kMiniBatchStream = 2;

double resolve_dist0(const ProblemInstance& problem, const Vec& u0,
                     const std::optional<double>& given) {
    if (given) {
        if (*given <= 0.0) throw InvalidParameter("dist0 must be > 0");
        return *given;
    }
    if (problem.solution()) return std::max((u0 - *problem.solution()).norm(), 1e-12);
    throw InvalidParameter("dist0 is required when the problem solution is unknown");
}

std::int64_t ceil_iterations(double raw) {
    if (!(raw > 0.0)) return 1;
    const double capped = std::min(raw, 4.0e18);
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(capped)));
}

std::int64_t init_batch(double sigma, double eps, double scale) {
    const double raw = scale * 8.0 * sigma * sigma / (eps * eps);
    if (!(raw > 1.0)) return 1;
    return static_cast<std::int64_t>(std::ceil(std::min(raw, 4.0e18)));
}

void check_finite(const Vec& u, std::int64_t k, const char* what) {
    if (!all_finite(u))
        throw DivergenceError(k, std::string(what) + " became non-finite at iteration " +
                                     std::to_string(k));
}

double dist_or_nan(const ProblemInstance& problem, const Vec& u) {
    if (!problem.solution()) return std::numeric_limits<double>::quiet_NaN();
    return (u - *problem.solution()).norm();
}

/// Uniform front-end over the three estimator kinds for the one-step loops.
/// The two-step loop drives PageState directly because its estimator tracks
/// the leading sequence.
class EstimateDriver {
  public:
    EstimateDriver(EstimatorKind kind, const PageSettings& settings, const Vec& u0,
                   const StochasticOracle& oracle, RngStream rng, double sigma, double eps,
                   double scale)
        : kind_(kind), settings_(settings), mb_rng_(rng.fork(kMiniBatchStream)), sigma_(sigma),
          eps_(eps), scale_(scale) {
        switch (kind_) {
            case EstimatorKind::Page: {
                const std::int64_t s1_0 =
                    init_batch(sigma, eps, scale * settings.s1_scale);
                page_ = page_init(u0, s1_0, oracle, rng.fork(kEstimatorStream));
                init_ = {page_->estimate, page_->cumulative_queries};
                init_s1_ = s1_0;
                break;
            }
            case EstimatorKind::MiniBatch: {
                const std::int64_t s = minibatch_schedule(0, sigma, eps, scale);
                auto r = minibatch_estimate(u0, s, oracle, mb_rng_);
                init_ = {r.estimate, r.queries_used};
                init_s1_ = s;
                break;
            }
            case EstimatorKind::SingleSample: {
                auto r = minibatch_estimate(u0, 1, oracle, mb_rng_);
                init_ = {r.estimate, r.queries_used};
                init_s1_ = 1;
                break;
            }
        }
    }

    const Vec& init_estimate() const { return init_.first; }
    std::uint64_t init_queries() const { return init_.second; }
    std::int64_t init_s1() const { return init_s1_; }

    PageStepResult step(std::int64_t k, const Vec& point, const StochasticOracle& oracle) {
        PageStepResult out;
        switch (kind_) {
            case EstimatorKind::Page:
                out = page_step(*page_, point, oracle, settings_);
                break;
            case EstimatorKind::MiniBatch: {
                const std::int64_t s = minibatch_schedule(k, sigma_, eps_, scale_);
                auto r = minibatch_estimate(point, s, oracle, mb_rng_);
                out.estimate = std::move(r.estimate);
                out.queries_used = r.queries_used;
                out.schedule.s1 = s;
                out.schedule.s2 = 0;
                out.refreshed = true;
                break;
            }
            case EstimatorKind::SingleSample: {
                auto r = minibatch_estimate(point, 1, oracle, mb_rng_);
                out.estimate = std::move(r.estimate);
                out.queries_used = r.queries_used;
                out.schedule.s1 = 1;
                out.schedule.s2 = 0;
                out.refreshed = true;
                break;
            }
        }
        return out;
    }

    std::int64_t s2_cap_hits() const { return page_ ? page_->s2_cap_hits : 0; }

  private:
    EstimatorKind kind_;
    PageSettings settings_;
    std::optional<PageState> page_;
    RngStream mb_rng_;
    double sigma_, eps_, scale_;
    std::pair<Vec, std::uint64_t> init_{Vec(), 0};
    std::int64_t init_s1_ = 1;
};

SolveResult anchored_one_step(const ProblemInstance& problem, const Vec& u0,
                              const CocoerciveConfig& config, bool constrained) {
    if (config.eps <= 0.0) throw InvalidParameter("halpern: eps must be > 0");
    const double L = config.lipschitz.value_or(problem.constants().lipschitz);
    if (L <= 0.0) throw InvalidParameter("halpern: lipschitz constant must be > 0");
    require_dim(u0, problem.dim(), "halpern: u0");

    const Projection* proj = nullptr;
    if (constrained) {
        if (!problem.projection())
            throw UnsupportedOperation("constrained halpern: problem carries no projection");
        proj = &*problem.projection();
    }

    const double sigma = problem.constants().sigma;
    const double dist0 = resolve_dist0(problem, u0, config.dist0);
    const double lambda0 = (constrained ? 20.0 : 76.0) * L * dist0;
    const std::int64_t n_iters =
        config.max_iters ? *config.max_iters
                         : ceil_iterations(config.constant_scale * 2.0 * lambda0 / config.eps);

    QueryCounter counter(problem.oracle());
    RngStream rng(config.master_seed, /*stream=*/0xA11C0ULL);
    PageSettings settings;
    settings.eps = config.eps;
    settings.sigma = sigma;
    settings.lipschitz = L;
    settings.rule = PkRule::Anchored;
    settings.s2_cap = config.s2_cap;
    settings.scale = config.constant_scale;
    settings.s1_scale = config.page_s1_scale;

    EstimateDriver driver(config.estimator, settings, u0, counter, rng, sigma, config.eps,
                          config.constant_scale);

    SolveResult result;
    result.point = u0;
    RunTrace& trace = result.trace;

    Vec estimate = driver.init_estimate();
    const bool has_truth = problem.has_true_operator();

    auto mapping_norm = [&](const Vec& u, const Vec& f_value) {
        if (!constrained) return f_value.norm();
        return gradient_mapping(u, f_value, L, *proj).norm();
    };

    {
        TraceRecord rec;
        rec.k = 0;
        rec.queries_cum = counter.count();
        rec.op_norm_est = mapping_norm(u0, estimate);
        if (has_truth) rec.op_norm_true = mapping_norm(u0, problem.true_value(u0));
        rec.batch_s1 = driver.init_s1();
        rec.branch = 'I';
        rec.dist_to_solution = dist_or_nan(problem, u0);
        trace.records.push_back(rec);
        if (config.keep_iterates) {
            trace.iterates.push_back(u0);
            trace.estimates.push_back(estimate);
        }
    }

    const std::int64_t stride = std::max<std::int64_t>(1, config.record_stride);
    Vec u_prev = u0;
    for (std::int64_t k = 1; k <= n_iters; ++k) {
        const double anchor_w = 1.0 / static_cast<double>(k + 1);
        const double carry_w = static_cast<double>(k) / static_cast<double>(k + 1);
        Vec forward = u_prev - estimate / L;
        if (constrained) forward = (*proj)(forward);
        Vec u_k = anchor_w * u0 + carry_w * forward;
        check_finite(u_k, k, "iterate");

        PageStepResult step = driver.step(k, u_k, counter);
        estimate = step.estimate;

        u_prev = u_k;
        result.point = u_k;
        const double est_norm = mapping_norm(u_k, estimate);
        bool stop = false;
        if (config.stop_on_estimate && est_norm <= config.eps) {
            trace.status = RunStatus::EarlyStopEstimate;
            stop = true;
        }
        if (config.query_budget && counter.count() >= *config.query_budget) {
            trace.status = RunStatus::BudgetExhausted;
            stop = true;
        }
        if (k % stride == 0 || k == n_iters || stop) {
            TraceRecord rec;
            rec.k = k;
            rec.queries_cum = counter.count();
            rec.op_norm_est = est_norm;
            if (has_truth) rec.op_norm_true = mapping_norm(u_k, problem.true_value(u_k));
            rec.batch_s1 = step.refreshed ? step.schedule.s1 : 0;
            rec.batch_s2 = step.refreshed ? 0 : step.schedule.s2;
            rec.branch = step.refreshed ? 'R' : 'C';
            rec.dist_to_solution = dist_or_nan(problem, u_k);
            trace.records.push_back(rec);
            if (config.keep_iterates) {
                trace.iterates.push_back(u_k);
                trace.estimates.push_back(estimate);
            }
        }
        if (stop) break;
    }

    trace.total_queries = counter.count();
    trace.s2_cap_hits = driver.s2_cap_hits();
    if (trace.s2_cap_hits > 0)
        std::fprintf(stderr, "warning: correction batch cap hit %lld time(s)\n",
                     static_cast<long long>(trace.s2_cap_hits));
    return result;
}

}  // namespace

double eta0_upper_bound(double lipschitz) {
    if (lipschitz <= 0.0) throw InvalidParameter("eta0_upper_bound: lipschitz must be > 0");
    return 1.0 / (3.0 * std::sqrt(3.0) * lipschitz);
}

double eta_schedule(double eta_prev, std::int64_t k, double m) {
    if (k < 1) throw InvalidParameter("eta_schedule: k must be >= 1");
    if (eta_prev <= 0.0) throw InvalidParameter("eta_schedule: eta_prev must be > 0");
    if (m <= 0.0) throw InvalidParameter("eta_schedule: m must be > 0");

    const double kd = static_cast<double>(k);
    const double kp1_sq = (kd + 1.0) * (kd + 1.0);
    const double lam_sq = 1.0 / kp1_sq;
    const double me2 = m * eta_prev * eta_prev;
    if (!(me2 < 1.0 - lam_sq))
        throw ScheduleCollapse("eta schedule collapsed at k = " + std::to_string(k) +
                               " (M eta^2 = " + std::to_string(me2) +
                               "); eta0 was chosen too large");
    return (1.0 - lam_sq - me2) * kp1_sq / ((1.0 - me2) * kd * (kd + 2.0)) * eta_prev;
}

double eta_floor(double eta0, double m) {
    const double me2 = m * eta0 * eta0;
    if (!(me2 < 0.5)) throw InvalidParameter("eta_floor: requires M eta0^2 < 1/2");
    return eta0 * (1.0 - 2.0 * me2) / (1.0 - me2);
}

Vec gradient_mapping(const Vec& u, const Vec& f_value, double eta, const Projection& proj) {
    if (eta <= 0.0) throw InvalidParameter("gradient_mapping: eta must be > 0");
    require_dim(f_value, u.size(), "gradient_mapping");
    if (proj.is_identity()) return f_value;  // eta (u - (u - F/eta)) collapses exactly
    return eta * (u - proj(u - f_value / eta));
}

SolveResult halpern_cocoercive(const ProblemInstance& problem, const Vec& u0,
                               const CocoerciveConfig& config) {
    return anchored_one_step(problem, u0, config, /*constrained=*/false);
}

SolveResult halpern_cocoercive_minibatch(const ProblemInstance& problem, const Vec& u0,
                                         CocoerciveConfig config) {
    config.estimator = EstimatorKind::MiniBatch;
    return anchored_one_step(problem, u0, config, /*constrained=*/false);
}

SolveResult halpern_cocoercive_constrained(const ProblemInstance& problem, const Vec& u0,
                                           const CocoerciveConfig& config) {
    return anchored_one_step(problem, u0, config, /*constrained=*/true);
}

SolveResult e_halpern(const ProblemInstance& problem, const Vec& u0,
                      const MonotoneConfig& config) {
    if (config.eps <= 0.0) throw InvalidParameter("e_halpern: eps must be > 0");
    const double L = config.lipschitz.value_or(problem.constants().lipschitz);
    if (L <= 0.0) throw InvalidParameter("e_halpern: lipschitz constant must be > 0");
    require_dim(u0, problem.dim(), "e_halpern: u0");

    const double eta_max = eta0_upper_bound(L);
    const double eta0 = config.eta0.value_or(eta_max);
    if (eta0 <= 0.0 || eta0 > eta_max * (1.0 + 1e-12))
        throw InvalidParameter("e_halpern: eta0 must lie in (0, 1/(3*sqrt(3)*L)]");

    const double m = 9.0 * L * L;
    const double eta_min = eta_floor(eta0, m);
    const double sigma = problem.constants().sigma;

    std::int64_t n_iters;
    if (config.max_iters) {
        n_iters = *config.max_iters;
    } else {
        const double dist0 = resolve_dist0(problem, u0, config.dist0);
        const double lambda0 =
            4.0 * (L * L * eta0 * eta_min + 1.0) * dist0 * dist0 / (eta_min * eta_min);
        const double lambda1 = 5.0 * (1.0 + m * eta_min * eta0) / (m * eta_min * eta_min);
        n_iters = ceil_iterations(config.constant_scale * std::sqrt(lambda0) /
                                  (std::sqrt(lambda1) * config.eps));
    }

    QueryCounter counter(problem.oracle());
    RngStream rng(config.master_seed, /*stream=*/0xE41ULL);
    PageSettings settings;
    settings.eps = config.eps;
    settings.sigma = sigma;
    settings.lipschitz = L;
    settings.rule = PkRule::Extrapolated;
    settings.s2_cap = config.s2_cap;
    settings.scale = config.constant_scale;
    settings.s1_scale = config.page_s1_scale;

    // The estimator lives on the leading sequence v_{-1}, v_0, v_1, ...
    const std::int64_t s1_init = init_batch(sigma, config.eps, config.constant_scale *
                                                                   config.page_s1_scale);
    std::optional<PageState> page;
    RngStream mb_rng = rng.fork(kMiniBatchStream);
    Vec estimate;  // F_tilde(v_{k-2}) entering iteration k
    std::int64_t init_s1 = s1_init;
    if (config.estimator == EstimatorKind::Page) {
        page = page_init(u0, s1_init, counter, rng.fork(kEstimatorStream));
        estimate = page->estimate;
    } else if (config.estimator == EstimatorKind::MiniBatch) {
        auto r = minibatch_estimate(u0, s1_init, counter, mb_rng);
        estimate = r.estimate;
    } else {
        auto r = minibatch_estimate(u0, 1, counter, mb_rng);
        estimate = r.estimate;
        init_s1 = 1;
    }

    SolveResult result;
    result.point = u0;
    RunTrace& trace = result.trace;
    const bool has_truth = problem.has_true_operator();

    {
        TraceRecord rec;
        rec.k = 0;
        rec.queries_cum = counter.count();
        rec.op_norm_est = estimate.norm();
        if (has_truth) rec.op_norm_true = problem.true_value(u0).norm();
        rec.batch_s1 = init_s1;
        rec.branch = 'I';
        rec.dist_to_solution = dist_or_nan(problem, u0);
        rec.eta = eta0;
        rec.uv_gap = 0.0;
        trace.records.push_back(rec);
        if (config.keep_iterates) {
            trace.iterates.push_back(u0);
            trace.estimates.push_back(estimate);
            trace.leading_points.push_back(u0);
        }
    }

    const std::int64_t stride = std::max<std::int64_t>(1, config.record_stride);
    Vec u_prev = u0;
    double eta_prev = eta0;
    for (std::int64_t k = 1; k <= n_iters; ++k) {
        const double anchor_w = 1.0 / static_cast<double>(k + 1);
        const double carry_w = static_cast<double>(k) / static_cast<double>(k + 1);

        Vec v_k = anchor_w * u0 + carry_w * u_prev - eta_prev * estimate;  // v_{k-1}
        check_finite(v_k, k, "leading point");

        PageStepResult step;
        if (config.estimator == EstimatorKind::Page) {
            step = page_step(*page, v_k, counter, settings);
        } else if (config.estimator == EstimatorKind::MiniBatch) {
            const std::int64_t s =
                minibatch_schedule(k, sigma, config.eps, config.constant_scale);
            auto r = minibatch_estimate(v_k, s, counter, mb_rng);
            step.estimate = std::move(r.estimate);
            step.queries_used = r.queries_used;
            step.schedule.s1 = s;
            step.refreshed = true;
        } else {
            auto r = minibatch_estimate(v_k, 1, counter, mb_rng);
            step.estimate = std::move(r.estimate);
            step.queries_used = r.queries_used;
            step.schedule.s1 = 1;
            step.refreshed = true;
        }

        Vec u_k = anchor_w * u0 + carry_w * u_prev - eta_prev * step.estimate;
        check_finite(u_k, k, "iterate");

        const double eta_k = eta_schedule(eta_prev, k, m);

        bool stop = false;
        if (config.query_budget && counter.count() >= *config.query_budget) {
            trace.status = RunStatus::BudgetExhausted;
            stop = true;
        }
        if (k % stride == 0 || k == n_iters || stop) {
            TraceRecord rec;
            rec.k = k;
            rec.queries_cum = counter.count();
            rec.op_norm_est = step.estimate.norm();
            if (has_truth) rec.op_norm_true = problem.true_value(u_k).norm();
            rec.batch_s1 = step.refreshed ? step.schedule.s1 : 0;
            rec.batch_s2 = step.refreshed ? 0 : step.schedule.s2;
            rec.branch = step.refreshed ? 'R' : 'C';
            rec.dist_to_solution = dist_or_nan(problem, u_k);
            rec.uv_gap = (u_k - v_k).norm();
            rec.eta = eta_k;
            trace.records.push_back(rec);
            if (config.keep_iterates) {
                trace.iterates.push_back(u_k);
                trace.estimates.push_back(step.estimate);
                trace.leading_points.push_back(v_k);
            }
        }

        estimate = step.estimate;
        u_prev = u_k;
        eta_prev = eta_k;
        result.point = u_k;
        if (stop) break;
    }

    trace.total_queries = counter.count();
    trace.s2_cap_hits = page ? page->s2_cap_hits : 0;
    if (trace.s2_cap_hits > 0)
        std::fprintf(stderr, "warning: correction batch cap hit %lld time(s)\n",
                     static_cast<long long>(trace.s2_cap_hits));
    return result;
}

SolveResult restarted_e_halpern(const ProblemInstance& problem, const Vec& u0,
                                const SharpConfig& config) {
    if (config.eps <= 0.0) throw InvalidParameter("restarted_e_halpern: eps must be > 0");
    const double L = config.lipschitz.value_or(problem.constants().lipschitz);
    const double mu = config.mu.value_or(problem.constants().sharpness);
    if (mu <= 0.0) throw InvalidParameter("restarted_e_halpern: sharpness mu must be > 0");
    const double eta_max = eta0_upper_bound(L);
    const double eta0 = config.eta0.value_or(eta_max);
    if (eta0 <= 0.0 || eta0 > eta_max * (1.0 + 1e-12))
        throw InvalidParameter("restarted_e_halpern: eta0 must lie in (0, 1/(3*sqrt(3)*L)]");

    const double m = 9.0 * L * L;
    const double eta_min = eta_floor(eta0, m);
    const double dist0 = resolve_dist0(problem, u0, config.dist0);

    const std::int64_t inner_iters = ceil_iterations(
        config.constant_scale * 4.0 * std::sqrt(L * L * eta0 * eta_min + 1.0) / (mu * eta_min));
    std::int64_t rounds;
    if (config.max_rounds) {
        rounds = *config.max_rounds;
    } else {
        const double arg = std::sqrt(6.0) * dist0 / (2.0 * config.eps);
        rounds = arg > 1.0 ? static_cast<std::int64_t>(
                                 std::ceil(std::log(arg) / std::log(config.log_base)))
                           : 0;
    }
    const double eps_inner = mu * config.eps * std::sqrt(m * eta_min * eta_min) /
                             (2.0 * std::sqrt(5.0 * (1.0 + m * eta_min * eta0)));

    SolveResult result;
    result.point = u0;
    RunTrace& trace = result.trace;
    std::uint64_t queries_offset = 0;
    Vec current = u0;

    for (std::int64_t round = 1; round <= rounds; ++round) {
        MonotoneConfig inner;
        inner.eps = eps_inner;
        inner.lipschitz = L;
        inner.eta0 = eta0;
        inner.max_iters = inner_iters;
        inner.master_seed = derive_seed(config.master_seed, static_cast<std::uint64_t>(round));
        inner.constant_scale = config.constant_scale;
        inner.s2_cap = config.s2_cap;
        inner.page_s1_scale = config.page_s1_scale;
        inner.keep_iterates = config.keep_iterates;
        inner.record_stride = config.record_stride;
        if (config.query_budget)
            inner.query_budget = *config.query_budget - std::min(*config.query_budget,
                                                                 queries_offset);

        SolveResult inner_result = e_halpern(problem, current, inner);

        for (TraceRecord rec : inner_result.trace.records) {
            rec.queries_cum += queries_offset;
            rec.restart = static_cast<int>(round);
            trace.records.push_back(rec);
        }
        if (config.keep_iterates) {
            trace.iterates.insert(trace.iterates.end(), inner_result.trace.iterates.begin(),
                                  inner_result.trace.iterates.end());
            trace.estimates.insert(trace.estimates.end(), inner_result.trace.estimates.begin(),
                                   inner_result.trace.estimates.end());
            trace.leading_points.insert(trace.leading_points.end(),
                                        inner_result.trace.leading_points.begin(),
                                        inner_result.trace.leading_points.end());
        }
        queries_offset += inner_result.trace.total_queries;
        trace.s2_cap_hits += inner_result.trace.s2_cap_hits;
        current = inner_result.point;
        result.point = current;

        if (config.query_budget && queries_offset >= *config.query_budget) {
            trace.status = RunStatus::BudgetExhausted;
            break;
        }
    }

    trace.total_queries = queries_offset;
    return result;
}

BaselineMethod baseline_from_name(const std::string& name) {
    if (name == "gda") return BaselineMethod::GDA;
    if (name == "eg") return BaselineMethod::EG;
    if (name == "popov") return BaselineMethod::Popov;
    if (name == "halpern_single") return BaselineMethod::HalpernSingleSample;
    throw InvalidParameter("unknown baseline method '" + name + "'");
}

SolveResult run_baseline(BaselineMethod method, const ProblemInstance& problem, const Vec& u0,
                         const BaselineConfig& config) {
    if (config.step <= 0.0) throw InvalidParameter("run_baseline: step must be > 0");
    if (config.batch < 1) throw InvalidParameter("run_baseline: batch must be >= 1");
    require_dim(u0, problem.dim(), "run_baseline: u0");

    QueryCounter counter(problem.oracle());
    RngStream rng(config.master_seed, /*stream=*/0xBA5EULL);
    RngStream mb_rng = rng.fork(kMiniBatchStream);
    const bool has_truth = problem.has_true_operator();
    const double gamma = config.step;

    SolveResult result;
    result.point = u0;
    RunTrace& trace = result.trace;

    auto record = [&](std::int64_t k, const Vec& u, double est_norm, std::int64_t batch) {
        TraceRecord rec;
        rec.k = k;
        rec.queries_cum = counter.count();
        rec.op_norm_est = est_norm;
        if (has_truth) rec.op_norm_true = problem.true_value(u).norm();
        rec.batch_s1 = batch;
        rec.dist_to_solution = dist_or_nan(problem, u);
        trace.records.push_back(rec);
        if (config.keep_iterates) trace.iterates.push_back(u);
    };

    record(0, u0, std::numeric_limits<double>::quiet_NaN(), 0);

    Vec u = u0;
    // Popov keeps the previous leading-point estimate; seed it at u0.
    Vec popov_estimate;
    if (method == BaselineMethod::Popov)
        popov_estimate = minibatch_estimate(u0, config.batch, counter, mb_rng).estimate;

    const std::int64_t iter_cap =
        config.max_iters.value_or(std::numeric_limits<std::int64_t>::max());
    const std::int64_t stride = std::max<std::int64_t>(1, config.record_stride);
    std::int64_t k = 0;
    while (counter.count() < config.budget && k < iter_cap) {
        ++k;
        double est_norm = 0.0;
        switch (method) {
            case BaselineMethod::GDA: {
                auto f = minibatch_estimate(u, config.batch, counter, mb_rng);
                u = u - gamma * f.estimate;
                est_norm = f.estimate.norm();
                break;
            }
            case BaselineMethod::EG: {
                auto f_u = minibatch_estimate(u, config.batch, counter, mb_rng);
                Vec w = u - gamma * f_u.estimate;
                auto f_w = minibatch_estimate(w, config.batch, counter, mb_rng);
                u = u - gamma * f_w.estimate;
                est_norm = f_w.estimate.norm();
                break;
            }
            case BaselineMethod::Popov: {
                Vec w = u - gamma * popov_estimate;
                auto f_w = minibatch_estimate(w, config.batch, counter, mb_rng);
                u = u - gamma * f_w.estimate;
                popov_estimate = f_w.estimate;
                est_norm = f_w.estimate.norm();
                break;
            }
            case BaselineMethod::HalpernSingleSample: {
                auto f = minibatch_estimate(u, config.batch, counter, mb_rng);
                const double anchor_w = 1.0 / static_cast<double>(k + 1);
                const double carry_w = static_cast<double>(k) / static_cast<double>(k + 1);
                u = anchor_w * u0 + carry_w * (u - gamma * f.estimate);
                est_norm = f.estimate.norm();
                break;
            }
        }
        check_finite(u, k, "iterate");
        const bool stop = counter.count() >= config.budget || k + 1 > iter_cap;
        if (k % stride == 0 || stop) record(k, u, est_norm, config.batch);
    }

    result.point = u;
    trace.status = counter.count() >= config.budget ? RunStatus::BudgetExhausted
                                                    : RunStatus::Completed;
    trace.total_queries = counter.count();
    return result;
}

}  // namespace anchor
