#include "anchor/oracle.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace anchor;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

/// Finite-sum toy: rows a1 = (1, 0), a2 = (0, 2), per-index estimate
/// g_i(u) = 2 <a_i, u> a_i (the n = 2 scaling); the mean is A^T A u.
FiniteSumOracle make_row_oracle() {
    std::vector<OperatorFn> comps;
    comps.push_back([](const Vec& u) { return Vec(2.0 * u(0) * vec2(1, 0)); });
    comps.push_back([](const Vec& u) { return Vec(4.0 * u(1) * vec2(0, 2)); });
    // Max single-row contribution norm: row 2 contributes 2 ||a_2||^2 = 8.
    return FiniteSumOracle(std::move(comps), /*sigma=*/10.0, /*lipschitz=*/8.0, 2);
}

}  // namespace

TEST_CASE("zero-noise oracle returns the operator value") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 0.0, 1.0, 2);
    auto out = sample(oracle, std::array<Vec, 1>{vec2(1, 0)}, Seed{123});
    CHECK(out[0] == vec2(1, 0));
}

TEST_CASE("sampling is deterministic in (points, seed)") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 1.0, 1.0, 2);
    const std::array<Vec, 2> pts{vec2(1, 0), vec2(0, 1)};
    auto first = sample(oracle, pts, Seed{42});
    auto second = sample(oracle, pts, Seed{42});
    CHECK(first[0] == second[0]);
    CHECK(first[1] == second[1]);
    CHECK(first.size() == 2);
}

TEST_CASE("multi-point query agrees with single-point queries under one seed") {
    GaussianOracle oracle([](const Vec& u) { return Vec(2.0 * u); }, 0.7, 2.0, 2);
    const Vec u = vec2(0.3, -1.2), v = vec2(2.0, 0.5);
    const Seed s{977};
    auto batched = sample(oracle, std::array<Vec, 2>{u, v}, s);
    CHECK(batched[0] == sample(oracle, std::array<Vec, 1>{u}, s)[0]);
    CHECK(batched[1] == sample(oracle, std::array<Vec, 1>{v}, s)[0]);
}

TEST_CASE("sample rejects dimension mismatches and empty input") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 0.0, 1.0, 2);
    Vec bad(3);
    bad << 1, 2, 3;
    CHECK_THROWS_AS(sample(oracle, std::array<Vec, 1>{bad}, Seed{1}), DimensionMismatch);
    CHECK_THROWS_AS(sample(oracle, std::span<const Vec>{}, Seed{1}), InvalidParameter);
}

TEST_CASE("finite-sum row oracle: seeds select rows, mean matches A^T A u") {
    FiniteSumOracle oracle = make_row_oracle();
    const Vec u = vec2(1, 1);

    // Both outcomes appear across seeds, and nothing else does.
    bool saw_row1 = false, saw_row2 = false;
    for (std::uint64_t s = 0; s < 64; ++s) {
        const Vec out = oracle.evaluate(u, Seed{s});
        if (out == vec2(2, 0)) saw_row1 = true;
        else if (out == vec2(0, 8)) saw_row2 = true;
        else FAIL("unexpected oracle output");
    }
    CHECK(saw_row1);
    CHECK(saw_row2);

    // Exact mean over the two equiprobable rows.
    const Vec mean = 0.5 * (vec2(2, 0) + vec2(0, 8));
    CHECK((*oracle.true_operator())(u) == mean);
}

TEST_CASE("check_unbiased on a deterministic oracle") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 0.0, 1.0, 2);
    auto report = check_unbiased(oracle, vec2(1, 0), 100, 1e-12);
    CHECK(report.pass);
    CHECK(report.deviation == 0.0);
}

TEST_CASE("check_unbiased on Gaussian noise sigma=1") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 1.0, 1.0, 2);
    auto report = check_unbiased(oracle, vec2(0, 0), 10000, 0.1, Seed{5});
    CHECK(report.pass);
    // CLT scale: the empirical mean should sit within a few sigma/sqrt(reps).
    CHECK(report.deviation < 0.05);
}

TEST_CASE("check_unbiased flags a biased oracle") {
    CallbackOracle biased(
        [](const Vec& u, Seed) { return Vec(u + vec2(1, 0)); },
        OracleSpec{0.0, 1.0, 2}, [](const Vec& u) { return u; });
    auto report = check_unbiased(biased, vec2(0, 0), 10000, 0.1, Seed{5});
    CHECK_FALSE(report.pass);
}

TEST_CASE("check_unbiased requires a true operator and enough reps") {
    CallbackOracle anonymous([](const Vec& u, Seed) { return u; }, OracleSpec{0.0, 1.0, 2});
    CHECK_THROWS_AS(check_unbiased(anonymous, vec2(0, 0), 100, 0.1), UnsupportedOperation);
    GaussianOracle oracle([](const Vec& u) { return u; }, 0.0, 1.0, 2);
    CHECK_THROWS_AS(check_unbiased(oracle, vec2(0, 0), 99, 0.1), InvalidParameter);
}

TEST_CASE("check_ms_lipschitz: identity has ratio exactly 1") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 0.5, 1.0, 2);
    auto report = check_ms_lipschitz(oracle, vec2(1, 0), vec2(0, 0), 200);
    CHECK(report.ratio == doctest::Approx(1.0));
    CHECK(report.pass);
}

TEST_CASE("check_ms_lipschitz: finite-sum oracle under its declared constant") {
    FiniteSumOracle oracle = make_row_oracle();
    auto report = check_ms_lipschitz(oracle, vec2(1, 1), vec2(0, 0), 400, Seed{7});
    // Exact expectation over the two rows is (2 w1^2 + 32 w2^2) <= 64 ||w||^2 here.
    CHECK(report.pass);
}

TEST_CASE("check_ms_lipschitz flags an understated constant") {
    std::vector<OperatorFn> comps;
    comps.push_back([](const Vec& u) { return Vec(2.0 * u(0) * vec2(1, 0)); });
    comps.push_back([](const Vec& u) { return Vec(4.0 * u(1) * vec2(0, 2)); });
    FiniteSumOracle undersold(std::move(comps), 10.0, /*lipschitz=*/2.0, 2);
    auto report = check_ms_lipschitz(undersold, vec2(0, 1), vec2(0, 0), 400, Seed{7});
    CHECK_FALSE(report.pass);
}

TEST_CASE("check_ms_lipschitz rejects coincident points") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 0.0, 1.0, 2);
    CHECK_THROWS_AS(check_ms_lipschitz(oracle, vec2(1, 0), vec2(1, 0), 200), InvalidParameter);
}

TEST_CASE("empirical mean error decays like 1/sqrt(n)") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 1.0, 1.0, 4);
    const Vec point = Vec::Zero(4);
    const OperatorFn& truth = *oracle.true_operator();

    auto mean_error = [&](int n, std::uint64_t seed) {
        RngStream seeds(Seed{seed});
        Vec mean = Vec::Zero(4);
        for (int i = 0; i < n; ++i) mean += oracle.evaluate(point, seeds.next_seed());
        mean /= n;
        return (mean - truth(point)).norm();
    };

    // E ||err||^2 = sigma^2 / n; allow a generous 4x factor over the RMS value.
    CHECK(mean_error(100, 11) < 4.0 / std::sqrt(100.0));
    CHECK(mean_error(10000, 13) < 4.0 / std::sqrt(10000.0));
}

TEST_CASE("noise second moment stays within the declared sigma^2") {
    const double sigma = 1.5;
    GaussianOracle oracle([](const Vec& u) { return u; }, sigma, 1.0, 8);
    const Vec point = Vec::Zero(8);
    const int reps = 4000;
    RngStream seeds(Seed{17});
    double acc = 0.0;
    for (int i = 0; i < reps; ++i)
        acc += (oracle.evaluate(point, seeds.next_seed()) - point).squaredNorm();
    const double measured = acc / reps;
    CHECK(measured <= sigma * sigma * (1.0 + 5.0 / std::sqrt(static_cast<double>(reps))));
}

TEST_CASE("query counter tallies every evaluation") {
    GaussianOracle oracle([](const Vec& u) { return u; }, 1.0, 1.0, 2);
    QueryCounter counter(oracle);
    (void)counter.evaluate(vec2(1, 0), Seed{1});
    (void)sample(counter, std::array<Vec, 2>{vec2(1, 0), vec2(0, 1)}, Seed{2});
    CHECK(counter.count() == 3);
}
