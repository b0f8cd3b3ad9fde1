#include "anchor/problem.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace anchor {

Projection Projection::ball(double radius, Vec center) {
    if (radius <= 0.0) throw InvalidParameter("Projection::ball: radius must be > 0");
    Projection p;
    p.kind_ = Kind::Ball;
    p.r_ = radius;
    p.a_ = std::move(center);
    return p;
}

Projection Projection::box(Vec lo, Vec hi) {
    if (lo.size() != hi.size()) throw InvalidParameter("Projection::box: bound sizes differ");
    if ((lo.array() > hi.array()).any())
        throw InvalidParameter("Projection::box: requires lo <= hi");
    Projection p;
    p.kind_ = Kind::Box;
    p.a_ = std::move(lo);
    p.b_ = std::move(hi);
    return p;
}

Projection Projection::halfspace(Vec normal, double offset) {
    if (normal.size() == 0 || normal.norm() == 0.0)
        throw InvalidParameter("Projection::halfspace: normal must be nonzero");
    Projection p;
    p.kind_ = Kind::Halfspace;
    p.a_ = std::move(normal);
    p.r_ = offset;
    return p;
}

Projection Projection::identity() { return Projection(); }

Vec Projection::operator()(const Vec& u) const {
    switch (kind_) {
        case Kind::Identity: return u;
        case Kind::Ball: {
            const Vec center = a_.size() ? a_ : Vec(Vec::Zero(u.size()));
            require_dim(u, center.size(), "Projection::ball");
            const Vec w = u - center;
            const double norm = w.norm();
            if (norm <= r_) return u;
            return center + (r_ / norm) * w;
        }
        case Kind::Box:
            require_dim(u, a_.size(), "Projection::box");
            return u.cwiseMax(a_).cwiseMin(b_);
        case Kind::Halfspace: {
            require_dim(u, a_.size(), "Projection::halfspace");
            const double overshoot = a_.dot(u) - r_;
            if (overshoot <= 0.0) return u;
            return u - (overshoot / a_.squaredNorm()) * a_;
        }
    }
    return u;
}

Vec ProblemInstance::true_value(const Vec& u) const {
    if (!true_op_) throw UnsupportedOperation("ProblemInstance: true operator not available");
    return true_op_(u);
}

ProblemInstance ProblemInstance::with_projection(Projection p) const {
    ProblemInstance copy = *this;
    copy.projection_ = std::move(p);
    return copy;
}

ProblemInstance ProblemInstance::with_sigma(double sigma,
                                            std::shared_ptr<const StochasticOracle> o) const {
    ProblemInstance copy = *this;
    copy.oracle_ = std::move(o);
    copy.constants_.sigma = sigma;
    return copy;
}

namespace {

Mat seeded_orthogonal(int dim, std::uint64_t gen_seed) {
    RngStream rng(Seed{gen_seed}, /*stream=*/0x51AB5ULL);
    Mat gauss(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) gauss(i, j) = rng.normal();
    Eigen::HouseholderQR<Mat> qr(gauss);
    Mat q = qr.householderQ();
    // Fix the sign convention so the factorization is unique.
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

Mat standard_antisymmetric(int dim) {
    Mat j = Mat::Zero(dim, dim);
    for (int i = 0; i + 1 < dim; i += 2) {
        j(i, i + 1) = 1.0;
        j(i + 1, i) = -1.0;
    }
    return j;
}

}  // namespace

ProblemInstance make_linear_problem(const LinearProblemSpec& spec) {
    if (spec.dim <= 0) throw InvalidParameter("make_linear_problem: dim must be positive");
    if (spec.spectrum.size() != static_cast<std::size_t>(spec.dim))
        throw InvalidParameter("make_linear_problem: spectrum size must equal dim");
    for (double ev : spec.spectrum)
        if (ev < 0.0) throw InvalidParameter("make_linear_problem: negative eigenvalue");

    const Mat q = seeded_orthogonal(spec.dim, spec.gen_seed);
    Vec eigs = Eigen::Map<const Vec>(spec.spectrum.data(), spec.dim);
    Mat m = q * eigs.asDiagonal() * q.transpose();
    if (spec.skew != 0.0) m += spec.skew * standard_antisymmetric(spec.dim);

    Eigen::JacobiSVD<Mat> svd(m);
    const double lipschitz = std::max(svd.singularValues()(0), 1e-300);
    const double ev_max = *std::max_element(spec.spectrum.begin(), spec.spectrum.end());
    const double ev_min = *std::min_element(spec.spectrum.begin(), spec.spectrum.end());

    ProblemConstants constants;
    constants.lipschitz = lipschitz;
    constants.sigma = spec.noise;
    constants.cocoercivity = (spec.skew == 0.0 && ev_max > 0.0) ? 1.0 / ev_max : 0.0;
    constants.sharpness = ev_min;

    OperatorFn op = [m](const Vec& u) { return Vec(m * u); };
    auto oracle =
        std::make_shared<GaussianOracle>(op, spec.noise, lipschitz, spec.dim);
    return ProblemInstance(std::move(oracle), constants, op, Vec(Vec::Zero(spec.dim)));
}

ProblemInstance make_identity_problem(int dim, double sigma) {
    if (dim <= 0) throw InvalidParameter("make_identity_problem: dim must be positive");
    OperatorFn op = [](const Vec& u) { return u; };
    ProblemConstants constants{/*lipschitz=*/1.0, sigma, /*cocoercivity=*/1.0, /*sharpness=*/1.0};
    auto oracle = std::make_shared<GaussianOracle>(op, sigma, 1.0, dim);
    return ProblemInstance(std::move(oracle), constants, op, Vec(Vec::Zero(dim)));
}

ProblemInstance make_bilinear_problem(double sigma) {
    LinearProblemSpec spec;
    spec.dim = 2;
    spec.spectrum = {0.0, 0.0};
    spec.skew = 1.0;
    spec.noise = sigma;
    return make_linear_problem(spec);
}

Vec rls_operator(const Vec& x, const Vec& y, const Mat& A, const Vec& b, double lambda) {
    const Eigen::Index n = A.rows();
    const Eigen::Index d = A.cols();
    require_dim(x, d, "rls_operator: x");
    require_dim(y, n, "rls_operator: y");
    require_dim(b, n, "rls_operator: b");

    const Vec residual = A * x - y;
    Vec out(d + n);
    out.head(d) = A.transpose() * residual / static_cast<double>(n);
    out.tail(n) = (residual + lambda * (y - b)) / static_cast<double>(n);
    return out;
}

namespace {

/// Single-row RLS oracle with n-scaling: the seed picks a uniform row i and
///   F_hat(u, i) = ( a_i (a_i^T x - y_i),  ((a_i^T x - y_i) + lambda (y_i - b_i)) e_i ).
/// Averaging over all rows recovers the full operator.
class RlsRowOracle final : public StochasticOracle {
  public:
    RlsRowOracle(Mat A, Vec b, double lambda, double sigma, double lipschitz, OperatorFn truth)
        : A_(std::move(A)), b_(std::move(b)), lambda_(lambda), truth_(std::move(truth)) {
        spec_ = OracleSpec{sigma, lipschitz, static_cast<int>(A_.rows() + A_.cols())};
    }

    OracleSpec spec() const override { return spec_; }

    Vec evaluate(const Vec& point, Seed seed) const override {
        require_dim(point, spec_.dim, "RlsRowOracle::evaluate");
        RngStream pick(seed);
        const Eigen::Index i =
            static_cast<Eigen::Index>(pick.below(static_cast<std::uint64_t>(A_.rows())));
        return row_value(point, i);
    }

    Vec row_value(const Vec& point, Eigen::Index i) const {
        const Eigen::Index n = A_.rows();
        const Eigen::Index d = A_.cols();
        const auto x = point.head(d);
        const auto y = point.tail(n);
        const double residual = A_.row(i).dot(x) - y(i);
        Vec out = Vec::Zero(d + n);
        out.head(d) = A_.row(i).transpose() * residual;
        out(d + i) = residual + lambda_ * (y(i) - b_(i));
        return out;
    }

    const OperatorFn* true_operator() const override { return &truth_; }

    Eigen::Index rows() const { return A_.rows(); }

  private:
    Mat A_;
    Vec b_;
    double lambda_;
    OperatorFn truth_;
    OracleSpec spec_;
};

/// Exact mean-square Lipschitz constant of the row oracle:
/// sqrt(lambda_max((1/n) sum_i H_i^T H_i)) for the per-row linear maps H_i.
double rls_row_ms_lipschitz(const Mat& A, double lambda) {
    const Eigen::Index n = A.rows();
    const Eigen::Index d = A.cols();
    const Vec w = A.rowwise().squaredNorm().array() + 1.0;  // ||a_i||^2 + 1

    Mat s(d + n, d + n);
    s.topLeftCorner(d, d) = A.transpose() * w.asDiagonal() * A;
    s.topRightCorner(d, n) = A.transpose() * (lambda * Mat::Identity(n, n) - Mat(w.asDiagonal()));
    s.bottomLeftCorner(n, d) = s.topRightCorner(d, n).transpose();
    s.bottomRightCorner(n, n) =
        Mat((w.array() - 2.0 * lambda + lambda * lambda).matrix().asDiagonal());
    s /= static_cast<double>(n);

    Eigen::SelfAdjointEigenSolver<Mat> eig(s, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

}  // namespace

ProblemInstance make_rls_problem(const RlsSpec& spec) {
    if (spec.lambda <= 1.0)
        throw InvalidParameter("make_rls_problem: lambda must exceed 1 (concavity in y)");
    const Eigen::Index n = spec.A.rows();
    const Eigen::Index d = spec.A.cols();
    if (n == 0 || d == 0) throw InvalidParameter("make_rls_problem: empty data matrix");
    require_dim(spec.b, n, "make_rls_problem: b");

    const Mat A = spec.A;
    const Vec b = spec.b;
    const double lambda = spec.lambda;
    OperatorFn truth = [A, b, lambda, n, d](const Vec& u) {
        return rls_operator(u.head(d), u.tail(n), A, b, lambda);
    };

    // Dense linear representation F(u) = H u + c, used for L and the solution.
    Mat h(d + n, d + n);
    h.topLeftCorner(d, d) = A.transpose() * A;
    h.topRightCorner(d, n) = -A.transpose();
    h.bottomLeftCorner(n, d) = A;
    h.bottomRightCorner(n, n) = (lambda - 1.0) * Mat::Identity(n, n);
    h /= static_cast<double>(n);
    Vec c = Vec::Zero(d + n);
    c.tail(n) = -(lambda / static_cast<double>(n)) * b;

    Eigen::BDCSVD<Mat> svd(h);
    const double lipschitz = svd.singularValues()(0);
    const Vec solution = Eigen::PartialPivLU<Mat>(h).solve(-c);

    ProblemConstants constants;
    constants.lipschitz = lipschitz;
    // Symmetric part of H is block diag(A^T A / n, (lambda-1)/n I); its smallest
    // eigenvalue gives the sharpness around the unique solution.
    {
        Eigen::SelfAdjointEigenSolver<Mat> eig(Mat(A.transpose() * A) / static_cast<double>(n),
                                               Eigen::EigenvaluesOnly);
        constants.sharpness =
            std::min(eig.eigenvalues().minCoeff(), (lambda - 1.0) / static_cast<double>(n));
        if (constants.sharpness < 0.0) constants.sharpness = 0.0;
    }

    if (spec.sampling == RlsSampling::Full) {
        constants.sigma = 0.0;
        auto oracle = std::make_shared<GaussianOracle>(truth, 0.0, lipschitz,
                                                       static_cast<int>(d + n));
        return ProblemInstance(std::move(oracle), constants, truth, solution);
    }

    // Under row sampling the mean-square Lipschitz constant of the single-row
    // estimates is the primary constant: it governs both the correction batch
    // sizes and the admissible step sizes, and dominates the operator norm of
    // the averaged map.
    const double ms_lipschitz = rls_row_ms_lipschitz(A, lambda);
    constants.lipschitz = ms_lipschitz;
    auto oracle = std::make_shared<RlsRowOracle>(A, b, lambda, /*sigma=*/0.0, ms_lipschitz, truth);

    // Exact noise second moment at the reference point, by row enumeration.
    Vec ref = spec.sigma_reference.size() ? spec.sigma_reference : Vec(Vec::Zero(d + n));
    require_dim(ref, d + n, "make_rls_problem: sigma_reference");
    const Vec f_ref = truth(ref);
    double second_moment = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        second_moment += (oracle->row_value(ref, i) - f_ref).squaredNorm();
    second_moment /= static_cast<double>(n);
    constants.sigma = std::sqrt(second_moment);

    auto sized = std::make_shared<RlsRowOracle>(A, b, lambda, constants.sigma, ms_lipschitz,
                                                truth);
    return ProblemInstance(std::move(sized), constants, truth, solution);
}

RlsSpec make_synthetic_rls(int n, int d, double lambda, std::uint64_t gen_seed) {
    if (n <= 0 || d <= 0) throw InvalidParameter("make_synthetic_rls: n and d must be positive");
    RngStream rng(Seed{gen_seed}, /*stream=*/0x515ULL);
    RlsSpec spec;
    spec.A.resize(n, d);
    const double col_scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) spec.A(i, j) = col_scale * rng.normal();
    Vec signal(d);
    for (int j = 0; j < d; ++j) signal(j) = rng.normal();
    spec.b = spec.A * signal;
    for (int i = 0; i < n; ++i) spec.b(i) += 0.1 * rng.normal();
    spec.lambda = lambda;
    return spec;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        std::size_t start = 0;
        while (start < cell.size() && cell[start] == ' ') ++start;
        cells.push_back(cell.substr(start));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
    const auto where = [&] {
        return " at row " + std::to_string(row) + ", column " + std::to_string(col);
    };
    if (cell.empty())
        throw InvalidParameter("load_matrix_csv: missing cell" + where());
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw InvalidParameter("load_matrix_csv: non-numeric cell '" + cell + "'" + where());
    return value;
}

}  // namespace

CsvMatrix load_matrix_csv(const std::string& path, const std::string& target_column,
                          const CsvLoadOptions& options) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("load_matrix_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw InvalidParameter("load_matrix_csv: empty file");
    const std::vector<std::string> header = split_csv_line(line);
    if (header.empty()) throw InvalidParameter("load_matrix_csv: empty header row");

    std::size_t target = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (header[j] == target_column) target = j;
    if (target == header.size()) {
        bool numeric = !target_column.empty() &&
                       std::all_of(target_column.begin(), target_column.end(),
                                   [](unsigned char ch) { return std::isdigit(ch); });
        if (numeric) target = static_cast<std::size_t>(std::stoull(target_column));
        if (target >= header.size())
            throw InvalidParameter("load_matrix_csv: target column '" + target_column +
                                   "' not found");
    }

    std::vector<std::vector<double>> rows;
    std::size_t row_index = 1;
    while (std::getline(in, line)) {
        ++row_index;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw InvalidParameter("load_matrix_csv: row " + std::to_string(row_index) + " has " +
                                   std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(header.size()));
        std::vector<double> parsed(cells.size());
        for (std::size_t j = 0; j < cells.size(); ++j)
            parsed[j] = parse_cell(cells[j], row_index, j + 1);
        rows.push_back(std::move(parsed));
    }
    if (rows.empty()) throw InvalidParameter("load_matrix_csv: no data rows");

    CsvMatrix out;
    const std::size_t n = rows.size();
    const std::size_t d = header.size() - 1;
    out.A.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    out.b.resize(static_cast<Eigen::Index>(n));
    out.target_name = header[target];
    for (std::size_t j = 0; j < header.size(); ++j)
        if (j != target) out.feature_names.push_back(header[j]);

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t col = 0;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (j == target)
                out.b(static_cast<Eigen::Index>(i)) = rows[i][j];
            else
                out.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col++)) = rows[i][j];
        }
    }

    if (options.standardize) {
        for (Eigen::Index j = 0; j < out.A.cols(); ++j) {
            const double mean = out.A.col(j).mean();
            out.A.col(j).array() -= mean;
            const double sd = std::sqrt(out.A.col(j).squaredNorm() /
                                        static_cast<double>(out.A.rows()));
            if (sd > 0.0) out.A.col(j) /= sd;
        }
    }
    return out;
}

}  // namespace anchor
