#include "anchor/diagnostics.hpp"

#include "anchor/output.hpp"
#include "anchor/solver.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace anchor;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

RunTrace synthetic_norm_trace(const std::function<double(double)>& norm_of_k, int n) {
    RunTrace trace;
    for (int k = 0; k <= n; ++k) {
        TraceRecord rec;
        rec.k = k;
        rec.op_norm_true = k >= 1 ? norm_of_k(static_cast<double>(k)) : 1.0;
        trace.records.push_back(rec);
    }
    return trace;
}

}  // namespace

TEST_CASE("one-step potential hand values") {
    // Identity operator, u0 = (1,0), u1 = (0.5,0), L = 1, k = 1.
    const double c1 = potential_cocoercive(1, vec2(0.5, 0), vec2(1, 0), vec2(0.5, 0), 1.0);
    CHECK(c1 == doctest::Approx(-0.25));

    // At a solution the potential vanishes.
    CHECK(potential_cocoercive(3, vec2(1, 0), vec2(1, 0), vec2(0, 0), 2.0) == 0.0);
}

TEST_CASE("one-step potential never rises along the noiseless run") {
    ProblemInstance problem = make_identity_problem(2, 0.0);
    CocoerciveConfig config;
    config.eps = 0.1;
    config.max_iters = 100;
    config.keep_iterates = true;
    config.master_seed = Seed{1};
    SolveResult result = halpern_cocoercive(problem, vec2(1, 0), config);

    double c1 = 0.0;
    for (std::size_t k = 1; k < result.trace.iterates.size(); ++k) {
        const Vec& u = result.trace.iterates[k];
        const double ck = potential_cocoercive(static_cast<std::int64_t>(k), u, vec2(1, 0),
                                               problem.true_value(u), 1.0);
        if (k == 1) c1 = ck;
        CHECK(ck <= c1 + 1e-12);
    }
}

TEST_CASE("two-step potential hand values") {
    CHECK(potential_monotone(5, vec2(0, 0), vec2(0, 0), vec2(0, 0), vec2(0, 0), 0.1, 1.0, 1.0) ==
          0.0);
    const double v1 =
        potential_monotone(1, vec2(1, 1), vec2(1, 1), vec2(1, 1), vec2(1, -1), 0.15, 1.0, 1.0);
    CHECK(v1 == doctest::Approx(0.9));
}

TEST_CASE("two-step potential never rises along the noiseless rotation run") {
    ProblemInstance problem = make_bilinear_problem(0.0);
    MonotoneConfig config;
    config.eps = 0.01;
    config.max_iters = 100;
    config.master_seed = Seed{2};
    config.keep_iterates = true;
    const Vec u0 = vec2(1, 1);
    SolveResult result = e_halpern(problem, u0, config);

    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < result.trace.iterates.size(); ++k) {
        const Vec& u = result.trace.iterates[k];
        const Vec& v = result.trace.leading_points[k];
        const double eta_k = result.trace.records[k].eta;
        const double vk = potential_monotone(static_cast<std::int64_t>(k), u, v, u0,
                                             problem.true_value(u), eta_k, 1.0, 1.0);
        CHECK(vk <= prev + 1e-12);
        prev = vk;
    }
}

TEST_CASE("potential evaluators are pure") {
    const Vec u = vec2(0.3, -0.7), u0 = vec2(1, 1), f = vec2(0.2, 0.1);
    CHECK(potential_cocoercive(4, u, u0, f, 2.0) == potential_cocoercive(4, u, u0, f, 2.0));
    CHECK(potential_monotone(4, u, u, u0, f, 0.12, 2.0, 1.5) ==
          potential_monotone(4, u, u, u0, f, 0.12, 2.0, 1.5));
}

TEST_CASE("rate fit recovers synthetic power laws to three decimals") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        RunTrace trace = synthetic_norm_trace(
            [alpha](double k) { return std::pow(k, -alpha); }, 500);
        const RateFit fit = fit_rate_exponent(trace, 0);
        CHECK(fit.slope == doctest::Approx(-alpha).epsilon(1e-9));
        CHECK(fit.r_squared == doctest::Approx(1.0));
    }
}

TEST_CASE("rate fit on exact 1/k and constant sequences") {
    RunTrace inv = synthetic_norm_trace([](double k) { return 1.0 / k; }, 100);
    CHECK(fit_rate_exponent(inv, 0).slope == doctest::Approx(-1.0).epsilon(1e-9));

    RunTrace flat = synthetic_norm_trace([](double) { return 0.5; }, 100);
    CHECK(fit_rate_exponent(flat, 0).slope == doctest::Approx(0.0));
}

TEST_CASE("rate fit demands enough usable points") {
    RunTrace tiny = synthetic_norm_trace([](double k) { return 1.0 / k; }, 15);
    CHECK_THROWS_AS(fit_rate_exponent(tiny, 0), InvalidParameter);
}

TEST_CASE("noiseless anchored run fits slope -1") {
    ProblemInstance problem = make_identity_problem(2, 0.0);
    CocoerciveConfig config;
    config.eps = 0.05;
    config.max_iters = 1000;
    config.master_seed = Seed{3};
    SolveResult result = halpern_cocoercive(problem, vec2(1, 0), config);
    const RateFit fit = fit_rate_exponent(result.trace, 10);
    CHECK(fit.slope >= -1.1);
    CHECK(fit.slope <= -0.9);
}

TEST_CASE("query scaling: validation, totals, and a clean quadratic law") {
    const SolverRunner fake = [](double eps, Seed) {
        RunTrace trace;
        TraceRecord rec;
        trace.records.push_back(rec);
        trace.total_queries = static_cast<std::uint64_t>(std::llround(100.0 / (eps * eps)));
        return trace;
    };

    const std::vector<double> grid{0.4, 0.2, 0.1};
    ScalingReport report = measure_query_scaling(fake, grid, 3, Seed{4});
    CHECK(report.complete());
    CHECK(report.fitted_exponent == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(report.r_squared == doctest::Approx(1.0));

    // Totals equal the traces' counters exactly.
    for (std::size_t e = 0; e < grid.size(); ++e)
        CHECK(report.mean_queries[e] ==
              doctest::Approx(std::llround(100.0 / (grid[e] * grid[e]))));

    CHECK_THROWS_AS(measure_query_scaling(fake, std::vector<double>{0.4, 0.2}, 3, Seed{4}),
                    InvalidParameter);
    CHECK_THROWS_AS(measure_query_scaling(fake, std::vector<double>{0.1, 0.2, 0.4}, 3, Seed{4}),
                    InvalidParameter);
    CHECK_THROWS_AS(measure_query_scaling(fake, grid, 0, Seed{4}), InvalidParameter);
}

TEST_CASE("query scaling keeps going around failed cells") {
    const SolverRunner flaky = [](double eps, Seed seed) {
        if (eps < 0.15 && seed.value % 2 == 0) throw DivergenceError(3, "blew up");
        RunTrace trace;
        trace.total_queries = static_cast<std::uint64_t>(10.0 / eps);
        return trace;
    };
    ScalingReport report = measure_query_scaling(flaky, std::vector<double>{0.4, 0.2, 0.1}, 4,
                                                 Seed{5});
    CHECK_FALSE(report.complete());
    CHECK(report.failures.size() >= 1);
    int failed_cells = 0;
    for (const ScalingCell& cell : report.cells)
        if (cell.failed) ++failed_cells;
    CHECK(failed_cells == static_cast<int>(report.failures.size()));
}

TEST_CASE("number formatting round-trips at 17 significant digits") {
    for (double v : {1.0 / 3.0, 2.5e-17, 123456789.123456, -0.0625}) {
        const std::string text = format_number(v);
        CHECK(std::stod(text) == v);
    }
    CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("trace csv has a header and one row per record") {
    RunTrace trace = synthetic_norm_trace([](double k) { return 1.0 / k; }, 3);
    std::ostringstream out;
    write_trace_csv(out, trace);
    const std::string text = out.str();
    CHECK(text.rfind("k,queries_cum,op_norm_true", 0) == 0);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 5);  // header + 4 records
}
