#ifndef ANCHOR_ORACLE_HPP
#define ANCHOR_ORACLE_HPP

#include "anchor/rng.hpp"
#include "anchor/types.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace anchor {

using OperatorFn = std::function<Vec(const Vec&)>;

/// Declared statistics of a stochastic operator oracle: sigma bounds the
/// total second moment of the noise, lipschitz bounds the mean-square
/// Lipschitz constant of same-seed differences.
struct OracleSpec {
    double sigma = 0.0;
    double lipschitz = 1.0;
    int dim = 0;
};

/// Stochastic evaluation access to an operator F. Implementations must be
/// pure in (point, seed): identical inputs give bit-identical outputs, and
/// evaluating several points under one seed couples them through the same
/// realization. Immutable after construction; safe to call concurrently.
class StochasticOracle {
  public:
    virtual ~StochasticOracle() = default;

    virtual OracleSpec spec() const = 0;
    virtual Vec evaluate(const Vec& point, Seed seed) const = 0;

    /// True operator, when the oracle can expose it (used by statistical
    /// checks and diagnostics, never by solvers).
    virtual const OperatorFn* true_operator() const { return nullptr; }

    int dim() const { return spec().dim; }
};

/// Batched same-seed query: returns F_hat(p, z) for each p under one z.
std::vector<Vec> sample(const StochasticOracle& oracle, std::span<const Vec> points, Seed seed);

/// Per-run query counter. Wraps an oracle without copying it; the count is
/// atomic so concurrent batch evaluation stays well-defined.
class QueryCounter final : public StochasticOracle {
  public:
    explicit QueryCounter(const StochasticOracle& inner) : inner_(inner) {}

    OracleSpec spec() const override { return inner_.spec(); }
    Vec evaluate(const Vec& point, Seed seed) const override {
        count_.fetch_add(1, std::memory_order_relaxed);
        return inner_.evaluate(point, seed);
    }
    const OperatorFn* true_operator() const override { return inner_.true_operator(); }

    std::uint64_t count() const { return count_.load(std::memory_order_relaxed); }

  private:
    const StochasticOracle& inner_;
    mutable std::atomic<std::uint64_t> count_{0};
};

/// F_hat(u, z) = F(u) + g(z) with g isotropic Gaussian scaled so that
/// E||g||^2 = sigma^2. The noise depends on the seed only, hence same-seed
/// differences are exactly F(u) - F(v).
class GaussianOracle final : public StochasticOracle {
  public:
    GaussianOracle(OperatorFn op, double sigma, double lipschitz, int dim);

    OracleSpec spec() const override { return spec_; }
    Vec evaluate(const Vec& point, Seed seed) const override;
    const OperatorFn* true_operator() const override { return &op_; }

  private:
    OperatorFn op_;
    OracleSpec spec_;
    double coord_std_;
};

/// Finite-sum oracle over per-index estimates g_i with F(u) = (1/n) sum_i
/// g_i(u); the seed pins a uniform index and the oracle returns g_i(u)
/// directly (each g_i carries the n-scaling of its 1/n weight, which is what
/// makes a single draw unbiased). Multi-point queries share the index.
class FiniteSumOracle final : public StochasticOracle {
  public:
    FiniteSumOracle(std::vector<OperatorFn> components, double sigma, double lipschitz, int dim);

    OracleSpec spec() const override { return spec_; }
    Vec evaluate(const Vec& point, Seed seed) const override;
    const OperatorFn* true_operator() const override { return &mean_; }

    std::size_t component_index(Seed seed) const;

  private:
    std::vector<OperatorFn> components_;
    OperatorFn mean_;
    OracleSpec spec_;
};

/// Arbitrary (point, seed) -> value oracle; mostly for tests and adapters.
class CallbackOracle final : public StochasticOracle {
  public:
    using EvalFn = std::function<Vec(const Vec&, Seed)>;

    CallbackOracle(EvalFn eval, OracleSpec spec, OperatorFn true_op = nullptr)
        : eval_(std::move(eval)), spec_(spec), true_op_(std::move(true_op)) {}

    OracleSpec spec() const override { return spec_; }
    Vec evaluate(const Vec& point, Seed seed) const override {
        require_dim(point, spec_.dim, "CallbackOracle::evaluate");
        return eval_(point, seed);
    }
    const OperatorFn* true_operator() const override { return true_op_ ? &true_op_ : nullptr; }

  private:
    EvalFn eval_;
    OracleSpec spec_;
    OperatorFn true_op_;
};

struct UnbiasednessReport {
    Vec empirical_mean;
    double deviation = 0.0;      // ||mean - F(point)||
    double threshold = 0.0;      // tol + 3 * std / sqrt(reps)
    bool pass = false;
};

/// Monte Carlo check of unbiasedness at one point. Passes when the empirical
/// mean lands within tol plus a 3-sigma CLT band, so a correct oracle fails
/// only with negligible probability.
UnbiasednessReport check_unbiased(const StochasticOracle& oracle, const Vec& point,
                                  int reps, double tol, Seed seed = Seed{1});

struct MsLipschitzReport {
    double ratio = 0.0;  // measured second moment over L^2 ||u - v||^2
    double slack = 0.0;  // allowed overshoot, 5 / sqrt(reps)
    bool pass = false;
};

/// Monte Carlo check of the mean-square Lipschitz bound between two points,
/// evaluating both points under shared seeds.
MsLipschitzReport check_ms_lipschitz(const StochasticOracle& oracle, const Vec& u, const Vec& v,
                                     int reps, Seed seed = Seed{1});

}  // namespace anchor

#endif
