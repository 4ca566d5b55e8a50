#pragma once

#include "octacomp/error.hpp"
#include "octacomp/numeric.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace octacomp {

template <Scalar T>
using Matrix = std::vector<std::vector<T>>;

/// One failed metric axiom. Indices refer to rows of the input matrix; `k` is
/// only meaningful for triangle violations (d[i][k] > d[i][j] + d[j][k]).
struct MetricViolation {
  ErrorKind kind;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
};

class MetricValidationError : public Error {
 public:
  explicit MetricValidationError(std::vector<MetricViolation> violations);
  const std::vector<MetricViolation>& violations() const { return violations_; }

 private:
  std::vector<MetricViolation> violations_;
};

template <Scalar T>
class FiniteMetricSpace;

/// Checks every axiom and reports all violated instances at once. `tol` only
/// applies in float mode (symmetry and triangle inequality); rationals are
/// checked exactly. Throws NotSquare, MetricValidationError.
template <Scalar T>
FiniteMetricSpace<T> validate_metric(std::vector<std::string> labels, Matrix<T> dist,
                                     double tol = kDefaultTol);

/// Induced subspace in the order given by `subset`. Throws UnknownLabel.
template <Scalar T>
FiniteMetricSpace<T> restrict(const FiniteMetricSpace<T>& space,
                              const std::vector<std::string>& subset);

/// A finite labeled metric space. Immutable once constructed; the only way to
/// build one is through validate_metric (or restrict on an existing space).
template <Scalar T>
class FiniteMetricSpace {
 public:
  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(std::size_t i) const { return labels_[i]; }
  const T& operator()(std::size_t i, std::size_t j) const { return dist_[i][j]; }
  const Matrix<T>& matrix() const { return dist_; }

  /// Throws UnknownLabel.
  std::size_t index_of(const std::string& label) const;

 private:
  template <Scalar U>
  friend FiniteMetricSpace<U> validate_metric(std::vector<std::string>, Matrix<U>, double);
  template <Scalar U>
  friend FiniteMetricSpace<U> restrict(const FiniteMetricSpace<U>&, const std::vector<std::string>&);

  FiniteMetricSpace(std::vector<std::string> labels, Matrix<T> dist)
      : labels_(std::move(labels)), dist_(std::move(dist)) {}

  std::vector<std::string> labels_;
  Matrix<T> dist_;
};

/// Labels default to "0", "1", ...
template <Scalar T>
FiniteMetricSpace<T> validate_metric(Matrix<T> dist, double tol = kDefaultTol);

struct AdditivityResult {
  bool additive = true;
  std::optional<std::array<std::size_t, 4>> witness;
};

/// Four-point condition: for every quadruple, the two largest of the three
/// pairing sums agree within tol.
template <Scalar T>
AdditivityResult is_additive(const FiniteMetricSpace<T>& space, double tol = 0.0);

/// Role order used everywhere for six-point configurations. The diagonal
/// partner of role r is (r + 3) % 6.
inline constexpr std::array<const char*, 6> kRoleNames = {"x", "y", "z", "x'", "y'", "z'"};
inline constexpr std::size_t partner(std::size_t role) { return (role + 3) % 6; }

/// A six-point space with a bijective assignment of the roles x..z'.
template <Scalar T>
struct SixPointConfiguration {
  FiniteMetricSpace<T> space;
  std::array<std::size_t, 6> role_index;  // role -> row of `space`

  /// Rows taken in order: row i gets role i. Throws WrongPointCount.
  static SixPointConfiguration in_order(FiniteMetricSpace<T> space);
  const T& distance(std::size_t role_a, std::size_t role_b) const {
    return space(role_index[role_a], role_index[role_b]);
  }
};

FiniteMetricSpace<double> to_float(const FiniteMetricSpace<Rational>& space);

}  // namespace octacomp
