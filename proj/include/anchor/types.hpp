#ifndef ANCHOR_TYPES_HPP
#define ANCHOR_TYPES_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace anchor {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Identifies one realization of the oracle's random variable. The pair
/// (point, seed) fully determines an oracle output; there is no hidden state.
struct Seed {
    std::uint64_t value = 0;
};

class DimensionMismatch : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

class InvalidParameter : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// The oracle cannot support the requested check (e.g. no true operator).
class UnsupportedOperation : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The eta recurrence left its admissible region; eta0 was chosen too large.
class ScheduleCollapse : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// An iterate became non-finite. Carries the iteration index.
class DivergenceError : public std::runtime_error {
  public:
    DivergenceError(std::int64_t iteration, const std::string& what)
        : std::runtime_error(what), iteration(iteration) {}
    std::int64_t iteration;
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline void require_dim(const Vec& v, Eigen::Index dim, const char* who) {
    if (v.size() != dim)
        throw DimensionMismatch(std::string(who) + ": expected dimension " +
                                std::to_string(dim) + ", got " + std::to_string(v.size()));
}

}  // namespace anchor

#endif
