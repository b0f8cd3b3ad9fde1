#include "anchor/diagnostics.hpp"

#include "anchor/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace anchor {

double potential_cocoercive(std::int64_t k, const Vec& u_k, const Vec& u0, const Vec& f_uk,
                            double lipschitz) {
    if (k < 1) throw InvalidParameter("potential_cocoercive: k must be >= 1");
    if (lipschitz <= 0.0) throw InvalidParameter("potential_cocoercive: lipschitz must be > 0");
    const double kd = static_cast<double>(k);
    return kd * (kd + 1.0) / (2.0 * lipschitz) * f_uk.squaredNorm() +
           (kd + 1.0) * f_uk.dot(u_k - u0);
}

double potential_monotone(std::int64_t k, const Vec& u_k, const Vec& v_km1, const Vec& u0,
                          const Vec& f_uk, double eta_k, double lipschitz, double b0) {
    if (k < 1) throw InvalidParameter("potential_monotone: k must be >= 1");
    if (b0 <= 0.0) throw InvalidParameter("potential_monotone: b0 must be > 0");
    const double kd = static_cast<double>(k);
    const double a_k = b0 * (kd + 1.0) * (kd + 2.0) * eta_k / 2.0;
    const double b_k = (kd + 1.0) * b0;
    return a_k * f_uk.squaredNorm() + b_k * f_uk.dot(u_k - u0) +
           a_k * lipschitz * lipschitz * (u_k - v_km1).squaredNorm();
}

RateFit fit_loglog(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParameter("fit_loglog: need matching series with >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw InvalidParameter("fit_loglog: degenerate abscissa");

    RateFit fit;
    fit.slope = sxy / sxx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    fit.points = static_cast<int>(x.size());
    return fit;
}

RateFit fit_rate_exponent(const RunTrace& trace, std::int64_t burn_in) {
    std::vector<double> xs, ys;
    for (const TraceRecord& rec : trace.records) {
        if (rec.k <= burn_in || rec.k < 1) continue;
        if (!std::isfinite(rec.op_norm_true) || rec.op_norm_true <= 0.0) continue;
        xs.push_back(std::log(static_cast<double>(rec.k)));
        ys.push_back(std::log(rec.op_norm_true));
    }
    if (xs.size() < 20)
        throw InvalidParameter("fit_rate_exponent: fewer than 20 usable points after burn-in");
    return fit_loglog(xs, ys);
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body,
                  int workers) {
    if (count <= 0) return;
    int n_workers = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
    n_workers = std::max(1, std::min<int>(n_workers, static_cast<int>(count)));
    if (n_workers == 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_workers));
    for (int w = 0; w < n_workers; ++w)
        pool.emplace_back([&] {
            for (std::int64_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

ScalingReport measure_query_scaling(const SolverRunner& runner, std::span<const double> eps_grid,
                                    int replications, Seed master, int workers) {
    if (eps_grid.size() < 3)
        throw InvalidParameter("measure_query_scaling: need at least 3 eps values");
    for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
        if (!(eps_grid[i] > eps_grid[i + 1]))
            throw InvalidParameter("measure_query_scaling: eps grid must be strictly decreasing");
    if (eps_grid.back() <= 0.0)
        throw InvalidParameter("measure_query_scaling: eps values must be positive");
    if (replications < 1)
        throw InvalidParameter("measure_query_scaling: replications must be >= 1");

    ScalingReport report;
    report.eps_grid.assign(eps_grid.begin(), eps_grid.end());
    const std::int64_t cells = static_cast<std::int64_t>(eps_grid.size()) * replications;
    report.cells.resize(static_cast<std::size_t>(cells));

    parallel_for(cells, [&](std::int64_t cell) {
        const std::size_t e = static_cast<std::size_t>(cell) / replications;
        const int rep = static_cast<int>(cell % replications);
        ScalingCell& out = report.cells[static_cast<std::size_t>(cell)];
        out.eps = eps_grid[e];
        out.replication = rep;
        try {
            RunTrace trace = runner(eps_grid[e], derive_seed(master, static_cast<std::uint64_t>(cell)));
            out.queries = trace.total_queries;
        } catch (const std::exception& ex) {
            out.failed = true;
            out.error = ex.what();
        }
    }, workers);

    report.mean_queries.assign(eps_grid.size(), 0.0);
    std::vector<int> good(eps_grid.size(), 0);
    for (const ScalingCell& cell : report.cells) {
        if (cell.failed) {
            report.failures.push_back("eps=" + std::to_string(cell.eps) + " rep=" +
                                      std::to_string(cell.replication) + ": " + cell.error);
            continue;
        }
        for (std::size_t e = 0; e < eps_grid.size(); ++e)
            if (eps_grid[e] == cell.eps) {
                report.mean_queries[e] += static_cast<double>(cell.queries);
                ++good[e];
            }
    }

    std::vector<double> xs, ys;
    for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        if (good[e] == 0) continue;
        report.mean_queries[e] /= good[e];
        xs.push_back(std::log(1.0 / eps_grid[e]));
        ys.push_back(std::log(report.mean_queries[e]));
    }
    if (xs.size() >= 2) {
        const RateFit fit = fit_loglog(xs, ys);
        report.fitted_exponent = fit.slope;
        report.r_squared = fit.r_squared;
    }
    return report;
}

}  // namespace anchor
