#include "anchor/oracle.hpp"

#include <array>
#include <cmath>

namespace anchor {

std::vector<Vec> sample(const StochasticOracle& oracle, std::span<const Vec> points, Seed seed) {
    if (points.empty()) throw InvalidParameter("sample: empty point sequence");
    const int dim = oracle.dim();
    std::vector<Vec> out;
    out.reserve(points.size());
    for (const Vec& p : points) {
        require_dim(p, dim, "sample");
        out.push_back(oracle.evaluate(p, seed));
    }
    return out;
}

GaussianOracle::GaussianOracle(OperatorFn op, double sigma, double lipschitz, int dim)
    : op_(std::move(op)) {
    if (sigma < 0.0) throw InvalidParameter("GaussianOracle: sigma must be >= 0");
    if (lipschitz <= 0.0) throw InvalidParameter("GaussianOracle: lipschitz must be > 0");
    if (dim <= 0) throw InvalidParameter("GaussianOracle: dim must be positive");
    spec_ = OracleSpec{sigma, lipschitz, dim};
    coord_std_ = sigma / std::sqrt(static_cast<double>(dim));
}

Vec GaussianOracle::evaluate(const Vec& point, Seed seed) const {
    require_dim(point, spec_.dim, "GaussianOracle::evaluate");
    Vec value = op_(point);
    if (coord_std_ > 0.0) {
        RngStream noise(seed);
        for (Eigen::Index i = 0; i < value.size(); ++i)
            value[i] += coord_std_ * noise.normal();
    }
    return value;
}

FiniteSumOracle::FiniteSumOracle(std::vector<OperatorFn> components, double sigma,
                                 double lipschitz, int dim)
    : components_(std::move(components)) {
    if (components_.empty()) throw InvalidParameter("FiniteSumOracle: no components");
    if (lipschitz <= 0.0) throw InvalidParameter("FiniteSumOracle: lipschitz must be > 0");
    spec_ = OracleSpec{sigma, lipschitz, dim};
    mean_ = [this](const Vec& u) {
        Vec acc = Vec::Zero(spec_.dim);
        for (const auto& c : components_) acc += c(u);
        return Vec(acc / static_cast<double>(components_.size()));
    };
}

std::size_t FiniteSumOracle::component_index(Seed seed) const {
    RngStream pick(seed);
    return static_cast<std::size_t>(pick.below(components_.size()));
}

Vec FiniteSumOracle::evaluate(const Vec& point, Seed seed) const {
    require_dim(point, spec_.dim, "FiniteSumOracle::evaluate");
    return components_[component_index(seed)](point);
}

UnbiasednessReport check_unbiased(const StochasticOracle& oracle, const Vec& point, int reps,
                                  double tol, Seed seed) {
    if (reps < 100) throw InvalidParameter("check_unbiased: reps must be >= 100");
    const OperatorFn* truth = oracle.true_operator();
    if (truth == nullptr)
        throw UnsupportedOperation("check_unbiased: oracle exposes no true operator");

    RngStream seeds(seed, /*stream=*/0x756E62ULL);
    std::vector<Vec> draws;
    draws.reserve(static_cast<std::size_t>(reps));
    Vec mean = Vec::Zero(point.size());
    for (int r = 0; r < reps; ++r) {
        draws.push_back(oracle.evaluate(point, seeds.next_seed()));
        mean += draws.back();
    }
    mean /= static_cast<double>(reps);

    double var = 0.0;
    for (const Vec& d : draws) var += (d - mean).squaredNorm();
    var /= static_cast<double>(reps - 1);

    UnbiasednessReport report;
    report.empirical_mean = mean;
    report.deviation = (mean - (*truth)(point)).norm();
    report.threshold = tol + 3.0 * std::sqrt(var / static_cast<double>(reps));
    report.pass = report.deviation <= report.threshold;
    return report;
}

MsLipschitzReport check_ms_lipschitz(const StochasticOracle& oracle, const Vec& u, const Vec& v,
                                     int reps, Seed seed) {
    if (reps < 100) throw InvalidParameter("check_ms_lipschitz: reps must be >= 100");
    const double dist_sq = (u - v).squaredNorm();
    if (dist_sq == 0.0) throw InvalidParameter("check_ms_lipschitz: u and v coincide");

    RngStream seeds(seed, /*stream=*/0x6C6970ULL);
    double acc = 0.0;
    const std::array<Vec, 2> pts{u, v};
    for (int r = 0; r < reps; ++r) {
        auto pair = sample(oracle, pts, seeds.next_seed());
        acc += (pair[0] - pair[1]).squaredNorm();
    }
    const double lip = oracle.spec().lipschitz;

    MsLipschitzReport report;
    report.ratio = acc / static_cast<double>(reps) / (lip * lip * dist_sq);
    report.slack = 5.0 / std::sqrt(static_cast<double>(reps));
    report.pass = report.ratio <= 1.0 + report.slack;
    return report;
}

}  // namespace anchor
