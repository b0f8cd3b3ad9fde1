#ifndef ANCHOR_PROBLEM_HPP
#define ANCHOR_PROBLEM_HPP

#include "anchor/oracle.hpp"
#include "anchor/types.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace anchor {

/// Euclidean projection onto a simple closed convex set.
class Projection {
  public:
    static Projection ball(double radius, Vec center = Vec());
    static Projection box(Vec lo, Vec hi);
    static Projection halfspace(Vec normal, double offset);  // { u : <normal, u> <= offset }
    static Projection identity();

    Vec operator()(const Vec& u) const;
    double distance(const Vec& u) const { return (u - (*this)(u)).norm(); }
    bool is_identity() const { return kind_ == Kind::Identity; }

  private:
    enum class Kind { Identity, Ball, Box, Halfspace };
    Kind kind_ = Kind::Identity;
    Vec a_, b_;
    double r_ = 0.0;
};

/// Operator constants declared by a problem. Zero means "not known / not
/// applicable" for cocoercivity and sharpness.
struct ProblemConstants {
    double lipschitz = 1.0;
    double sigma = 0.0;
    double cocoercivity = 0.0;  // gamma with <F(u)-F(v), u-v> >= gamma ||F(u)-F(v)||^2
    double sharpness = 0.0;     // mu with <F(u)-F(u*), u-u*> >= mu ||u-u*||^2
};

/// Bundles the true operator (when known), the stochastic oracle, an optional
/// feasible-set projection, an optional known solution, and the declared
/// constants. Immutable after construction and safe to share across runs.
class ProblemInstance {
  public:
    ProblemInstance(std::shared_ptr<const StochasticOracle> oracle, ProblemConstants constants,
                    OperatorFn true_op = nullptr, std::optional<Vec> solution = std::nullopt,
                    std::optional<Projection> projection = std::nullopt)
        : oracle_(std::move(oracle)),
          constants_(constants),
          true_op_(std::move(true_op)),
          solution_(std::move(solution)),
          projection_(std::move(projection)) {}

    const StochasticOracle& oracle() const { return *oracle_; }
    const ProblemConstants& constants() const { return constants_; }
    int dim() const { return oracle_->dim(); }

    bool has_true_operator() const { return static_cast<bool>(true_op_); }
    Vec true_value(const Vec& u) const;

    const std::optional<Vec>& solution() const { return solution_; }
    const std::optional<Projection>& projection() const { return projection_; }

    ProblemInstance with_projection(Projection p) const;
    ProblemInstance with_sigma(double sigma, std::shared_ptr<const StochasticOracle> o) const;

  private:
    std::shared_ptr<const StochasticOracle> oracle_;
    ProblemConstants constants_;
    OperatorFn true_op_;
    std::optional<Vec> solution_;
    std::optional<Projection> projection_;
};

/// Recipe for a synthetic linear problem F(u) = M u with
/// M = Q diag(spectrum) Q^T + skew * J for a seeded orthogonal Q and the
/// standard antisymmetric J. The solution is the origin.
struct LinearProblemSpec {
    int dim = 2;
    std::vector<double> spectrum;  // eigenvalues of the symmetric part, all >= 0
    double skew = 0.0;
    double noise = 0.0;            // sigma of the attached Gaussian oracle
    std::uint64_t gen_seed = 7;
};

ProblemInstance make_linear_problem(const LinearProblemSpec& spec);

/// d-dimensional identity operator with Gaussian noise: the canonical
/// 1-cocoercive test case (L = gamma = mu = 1, u* = 0).
ProblemInstance make_identity_problem(int dim, double sigma);

/// The 2-d rotation F(x, y) = (y, -x): monotone, 1-Lipschitz, not cocoercive.
ProblemInstance make_bilinear_problem(double sigma);

/// Robust least squares saddle operator on u = (x, y):
///   F(u) = ( (1/n) A^T (A x - y),  (1/n)(A x - y) + (lambda/n)(y - b) ).
/// Requires lambda > 1 so the inner maximization is concave.
Vec rls_operator(const Vec& x, const Vec& y, const Mat& A, const Vec& b, double lambda);

enum class RlsSampling { Full, RowSubsample };

struct RlsSpec {
    Mat A;
    Vec b;
    double lambda = 1.5;
    RlsSampling sampling = RlsSampling::RowSubsample;
    Vec sigma_reference;  // point where sigma is measured; defaults to zero
};

/// Builds the RLS problem instance: exact linear representation (for the true
/// operator, L, and the solution), plus either the single-row oracle with
/// n-scaling or a noiseless full oracle. Sigma is measured exactly at the
/// reference point by enumerating all rows.
ProblemInstance make_rls_problem(const RlsSpec& spec);

/// Synthetic RLS data with unit-scale Gaussian entries and a planted signal.
RlsSpec make_synthetic_rls(int n, int d, double lambda, std::uint64_t gen_seed);

struct CsvLoadOptions {
    bool standardize = false;  // center/scale the feature columns
};

struct CsvMatrix {
    Mat A;
    Vec b;
    std::vector<std::string> feature_names;
    std::string target_name;
};

/// Loads a numeric CSV (header row, comma separated) and splits off one
/// target column by name or zero-based index. Rows with missing or
/// non-numeric cells are rejected with their location.
CsvMatrix load_matrix_csv(const std::string& path, const std::string& target_column,
                          const CsvLoadOptions& options = {});

}  // namespace anchor

#endif
