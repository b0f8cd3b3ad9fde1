#include "anchor/problem.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace anchor;

namespace {

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec random_vec(RngStream& rng, int dim, double scale = 1.0) {
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = scale * rng.normal();
    return v;
}

struct TempCsv {
    std::string path;
    explicit TempCsv(const std::string& content) {
        static int counter = 0;
        path = "anchor_test_" + std::to_string(counter++) + ".csv";
        std::ofstream out(path);
        out << content;
    }
    ~TempCsv() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("linear problem constants from the spectrum") {
    LinearProblemSpec spec;
    spec.dim = 2;
    spec.spectrum = {1.0, 2.0};
    ProblemInstance p = make_linear_problem(spec);
    CHECK(p.constants().lipschitz == doctest::Approx(2.0));
    CHECK(p.constants().cocoercivity == doctest::Approx(0.5));
    CHECK(p.constants().sharpness == doctest::Approx(1.0));
    CHECK(p.solution().has_value());
    CHECK(p.solution()->norm() == 0.0);
}

TEST_CASE("pure rotation is the bilinear saddle operator") {
    ProblemInstance p = make_bilinear_problem(0.0);
    CHECK(p.constants().lipschitz == doctest::Approx(1.0));
    CHECK(p.constants().sharpness == doctest::Approx(0.0));
    CHECK(p.true_value(vec2(1, 0)) == vec2(0, -1));
    CHECK(p.true_value(vec2(0, 1)) == vec2(1, 0));
}

TEST_CASE("identity problem is the canonical cocoercive case") {
    ProblemInstance p = make_identity_problem(3, 0.5);
    CHECK(p.constants().lipschitz == doctest::Approx(1.0));
    CHECK(p.constants().cocoercivity == doctest::Approx(1.0));
    Vec u(3);
    u << 1, 2, 3;
    CHECK(p.true_value(u) == u);
    CHECK(p.constants().sigma == doctest::Approx(0.5));
}

TEST_CASE("linear problem rejects negative eigenvalues") {
    LinearProblemSpec spec;
    spec.dim = 2;
    spec.spectrum = {1.0, -0.5};
    CHECK_THROWS_AS(make_linear_problem(spec), InvalidParameter);
}

TEST_CASE("cocoercivity certificate on random pairs") {
    LinearProblemSpec spec;
    spec.dim = 6;
    spec.spectrum = {0.2, 0.5, 1.0, 1.5, 2.5, 4.0};
    spec.gen_seed = 21;
    ProblemInstance p = make_linear_problem(spec);
    const double gamma = p.constants().cocoercivity;
    RngStream rng(Seed{22});
    for (int t = 0; t < 1000; ++t) {
        const Vec u = random_vec(rng, 6), v = random_vec(rng, 6);
        const Vec fu = p.true_value(u), fv = p.true_value(v);
        CHECK((fu - fv).dot(u - v) >= gamma * (fu - fv).squaredNorm() - 1e-9);
    }
}

TEST_CASE("sharpness certificate on random points") {
    LinearProblemSpec spec;
    spec.dim = 4;
    spec.spectrum = {0.25, 0.5, 0.75, 1.0};
    spec.skew = 0.3;
    spec.gen_seed = 23;
    ProblemInstance p = make_linear_problem(spec);
    const double mu = p.constants().sharpness;
    CHECK(mu == doctest::Approx(0.25));
    RngStream rng(Seed{24});
    for (int t = 0; t < 1000; ++t) {
        const Vec u = random_vec(rng, 4);
        CHECK(p.true_value(u).dot(u) >= mu * u.squaredNorm() - 1e-9);
    }
}

TEST_CASE("rls operator hand value and stationarity") {
    Mat a(1, 1);
    a << 1.0;
    Vec b(1);
    b << 0.0;

    SUBCASE("n=1 hand value") {
        Vec x(1), y(1);
        x << 1.0;
        y << 0.0;
        const Vec f = rls_operator(x, y, a, b, 1.5);
        CHECK(f(0) == doctest::Approx(1.0));
        CHECK(f(1) == doctest::Approx(1.0));
    }
    SUBCASE("joint stationary point") {
        Vec x(1), y(1);
        x << 0.0;
        y << 0.0;  // Ax = y and y = b
        CHECK(rls_operator(x, y, a, b, 1.5).norm() == 0.0);
    }
}

TEST_CASE("rls operator matches central finite differences") {
    RlsSpec spec = make_synthetic_rls(12, 4, 1.5, 31);
    const Eigen::Index n = spec.A.rows(), d = spec.A.cols();

    auto lagrangian = [&](const Vec& u) {
        const Vec x = u.head(d), y = u.tail(n);
        const double nd = static_cast<double>(n);
        return (spec.A * x - y).squaredNorm() / (2.0 * nd) -
               spec.lambda * (y - spec.b).squaredNorm() / (2.0 * nd);
    };

    RngStream rng(Seed{32});
    const double h = 1e-6;
    for (int t = 0; t < 100; ++t) {
        const Vec u = random_vec(rng, static_cast<int>(d + n));
        const Vec f = rls_operator(u.head(d), u.tail(n), spec.A, spec.b, spec.lambda);
        for (Eigen::Index i = 0; i < d + n; ++i) {
            Vec up = u, dn = u;
            up(i) += h;
            dn(i) -= h;
            double fd = (lagrangian(up) - lagrangian(dn)) / (2.0 * h);
            if (i >= d) fd = -fd;  // saddle flips the y-block
            CHECK(f(i) == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("rls operator is monotone for lambda > 1") {
    RlsSpec spec = make_synthetic_rls(10, 3, 1.5, 33);
    RngStream rng(Seed{34});
    const Eigen::Index n = spec.A.rows(), d = spec.A.cols();
    for (int t = 0; t < 100; ++t) {
        const Vec u = random_vec(rng, static_cast<int>(d + n));
        const Vec v = random_vec(rng, static_cast<int>(d + n));
        const Vec fu = rls_operator(u.head(d), u.tail(n), spec.A, spec.b, spec.lambda);
        const Vec fv = rls_operator(v.head(d), v.tail(n), spec.A, spec.b, spec.lambda);
        CHECK((fu - fv).dot(u - v) >= -1e-10);
    }
}

TEST_CASE("rls problem instance: solution, oracle mean, sigma certification") {
    RlsSpec spec = make_synthetic_rls(20, 5, 1.5, 35);
    ProblemInstance p = make_rls_problem(spec);

    // Planted solution satisfies F(u*) = 0.
    CHECK(p.true_value(*p.solution()).norm() <= 1e-8);

    // Row oracle is unbiased: empirical mean over many seeds approaches F.
    RngStream rng(Seed{36});
    const Vec u = random_vec(rng, p.dim());
    auto report = check_unbiased(p.oracle(), u, 20000, 0.05, Seed{37});
    CHECK(report.pass);

    // Empirical noise second moment at the reference point stays within the
    // cached sigma^2 (which was computed there exactly).
    const double sigma_sq = p.constants().sigma * p.constants().sigma;
    const Vec ref = Vec::Zero(p.dim());
    const Vec truth = p.true_value(ref);
    RngStream seeds(Seed{38});
    double acc = 0.0;
    const int reps = 10000;
    for (int r = 0; r < reps; ++r)
        acc += (p.oracle().evaluate(ref, seeds.next_seed()) - truth).squaredNorm();
    CHECK(acc / reps <= sigma_sq * (1.0 + 5.0 / std::sqrt(static_cast<double>(reps))));
}

TEST_CASE("single-row rls problem collapses to the full operator") {
    Mat a(1, 2);
    a << 1.0, 2.0;
    Vec b(1);
    b << 0.5;
    RlsSpec spec;
    spec.A = a;
    spec.b = b;
    spec.lambda = 1.5;
    ProblemInstance p = make_rls_problem(spec);
    RngStream rng(Seed{39});
    for (int t = 0; t < 20; ++t) {
        const Vec u = random_vec(rng, 3);
        CHECK((p.oracle().evaluate(u, Seed{static_cast<std::uint64_t>(t)}) - p.true_value(u))
                  .norm() <= 1e-12);
    }
    CHECK(p.constants().sigma == doctest::Approx(0.0));
}

TEST_CASE("two-row rls oracle averages to the operator") {
    Mat a(2, 2);
    a << 1.0, 0.0, 0.0, 2.0;
    Vec b(2);
    b << 0.1, -0.3;
    RlsSpec spec;
    spec.A = a;
    spec.b = b;
    spec.lambda = 1.5;
    ProblemInstance p = make_rls_problem(spec);

    RngStream rng(Seed{40});
    const Vec u = random_vec(rng, 4);
    // Collect both distinct row outputs across seeds and average them.
    Vec out0, out1;
    bool have0 = false, have1 = false;
    for (std::uint64_t s = 0; s < 64 && !(have0 && have1); ++s) {
        const Vec out = p.oracle().evaluate(u, Seed{s});
        if (!have0) {
            out0 = out;
            have0 = true;
        } else if (out != out0 && !have1) {
            out1 = out;
            have1 = true;
        }
    }
    REQUIRE(have1);
    CHECK((0.5 * (out0 + out1) - p.true_value(u)).norm() <= 1e-12);
}

TEST_CASE("rls lambda at or below one is rejected") {
    RlsSpec spec = make_synthetic_rls(4, 2, 1.5, 41);
    spec.lambda = 1.0;
    CHECK_THROWS_AS(make_rls_problem(spec), InvalidParameter);
}

TEST_CASE("projections: hand values") {
    SUBCASE("ball radial scaling") {
        const Vec p = Projection::ball(1.0)(vec2(3, 4));
        CHECK(p(0) == doctest::Approx(0.6));
        CHECK(p(1) == doctest::Approx(0.8));
    }
    SUBCASE("box coordinate clip") {
        const Vec p = Projection::box(vec2(0, 0), vec2(1, 1))(vec2(-1, 0.5));
        CHECK(p == vec2(0, 0.5));
    }
    SUBCASE("halfspace") {
        const Vec p = Projection::halfspace(vec2(1, 0), 0.0)(vec2(2, 1));
        CHECK(p == vec2(0, 1));
    }
    SUBCASE("feasible points are fixed") {
        CHECK(Projection::ball(2.0)(vec2(1, 0)) == vec2(1, 0));
        CHECK(Projection::box(vec2(0, 0), vec2(1, 1))(vec2(0.5, 0.5)) == vec2(0.5, 0.5));
        CHECK(Projection::halfspace(vec2(0, 1), 1.0)(vec2(5, -2)) == vec2(5, -2));
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(Projection::ball(0.0), InvalidParameter);
        CHECK_THROWS_AS(Projection::box(vec2(1, 1), vec2(0, 0)), InvalidParameter);
        CHECK_THROWS_AS(Projection::halfspace(vec2(0, 0), 1.0), InvalidParameter);
    }
}

TEST_CASE("projections are idempotent and non-expansive") {
    std::vector<Projection> sets;
    sets.push_back(Projection::ball(1.5));
    sets.push_back(Projection::box(vec2(-1, 0), vec2(0.5, 2)));
    sets.push_back(Projection::halfspace(vec2(1, 2), 0.7));
    RngStream rng(Seed{42});
    for (const Projection& proj : sets) {
        for (int t = 0; t < 1000; ++t) {
            const Vec u = random_vec(rng, 2, 3.0), v = random_vec(rng, 2, 3.0);
            const Vec pu = proj(u), pv = proj(v);
            CHECK((proj(pu) - pu).norm() <= 1e-12);
            CHECK((pu - pv).norm() <= (u - v).norm() + 1e-12);
        }
    }
}

TEST_CASE("csv loader: parse, determinism, standardization, errors") {
    SUBCASE("toy parse by name and by index") {
        TempCsv file("f1,f2,target\n1,2,3\n4,5,6\n7,8,9\n");
        CsvMatrix m = load_matrix_csv(file.path, "target");
        CHECK(m.A.rows() == 3);
        CHECK(m.A.cols() == 2);
        CHECK(m.b(1) == doctest::Approx(6.0));
        CHECK(m.A(2, 1) == doctest::Approx(8.0));

        CsvMatrix by_index = load_matrix_csv(file.path, "2");
        CHECK(by_index.b == m.b);
        CHECK(by_index.target_name == "target");
    }
    SUBCASE("loading twice gives identical matrices") {
        TempCsv file("a,b\n0.25,1e-3\n-7,4.5\n");
        CsvMatrix m1 = load_matrix_csv(file.path, "b");
        CsvMatrix m2 = load_matrix_csv(file.path, "b");
        CHECK(m1.A == m2.A);
        CHECK(m1.b == m2.b);
    }
    SUBCASE("standardization makes columns zero-mean unit-std") {
        TempCsv file("a,b,t\n1,10,0\n2,20,0\n3,40,0\n4,70,0\n");
        CsvLoadOptions opts;
        opts.standardize = true;
        CsvMatrix m = load_matrix_csv(file.path, "t", opts);
        for (Eigen::Index j = 0; j < m.A.cols(); ++j) {
            CHECK(std::abs(m.A.col(j).mean()) <= 1e-10);
            const double sd =
                std::sqrt(m.A.col(j).squaredNorm() / static_cast<double>(m.A.rows()));
            CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
    SUBCASE("non-numeric cell is located") {
        TempCsv file("a,b\n1,2\n1,oops\n");
        CHECK_THROWS_WITH_AS(load_matrix_csv(file.path, "b"),
                             doctest::Contains("row 3"), InvalidParameter);
    }
    SUBCASE("short row is rejected") {
        TempCsv file("a,b,c\n1,2,3\n1,2\n");
        CHECK_THROWS_AS(load_matrix_csv(file.path, "c"), InvalidParameter);
    }
    SUBCASE("missing target column") {
        TempCsv file("a,b\n1,2\n");
        CHECK_THROWS_AS(load_matrix_csv(file.path, "z"), InvalidParameter);
    }
}
