#include "octacomp/metric.hpp"

#include <algorithm>
#include <sstream>

namespace octacomp {

namespace {

std::string describe(const std::vector<MetricViolation>& violations) {
  std::ostringstream out;
  out << violations.size() << " metric axiom violation(s)";
  if (!violations.empty()) {
    const auto& v = violations.front();
    out << "; first: " << to_string(v.kind) << " at (" << v.i << ", " << v.j;
    if (v.kind == ErrorKind::TriangleViolation) out << ", " << v.k;
    out << ")";
  }
  return out.str();
}

ErrorKind leading_kind(const std::vector<MetricViolation>& violations) {
  return violations.empty() ? ErrorKind::TriangleViolation : violations.front().kind;
}

template <Scalar T>
bool exceeds(const T& lhs, const T& rhs, double tol) {
  if constexpr (Arith<T>::exact) {
    return lhs > rhs;
  } else {
    return lhs > rhs + tol;
  }
}

}  // namespace

MetricValidationError::MetricValidationError(std::vector<MetricViolation> violations)
    : Error(leading_kind(violations), describe(violations)), violations_(std::move(violations)) {}

template <Scalar T>
std::size_t FiniteMetricSpace<T>::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::UnknownLabel, "unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

template <Scalar T>
FiniteMetricSpace<T> validate_metric(std::vector<std::string> labels, Matrix<T> dist,
                                     double tol) {
  const std::size_t n = dist.size();
  for (const auto& row : dist) {
    if (row.size() != n) throw Error(ErrorKind::NotSquare, "distance matrix is not square");
  }
  if (labels.size() != n) {
    throw Error(ErrorKind::NotSquare, "label count does not match matrix size");
  }
  {
    auto sorted = labels;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(ErrorKind::ParseError, "duplicate labels");
    }
  }

  std::vector<MetricViolation> violations;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (dist[i][j] < 0) violations.push_back({ErrorKind::NegativeEntry, i, j, 0});
    }
    if (dist[i][i] != 0) violations.push_back({ErrorKind::NonzeroDiagonal, i, i, 0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (exceeds<T>(dist[i][j], dist[j][i], tol) || exceeds<T>(dist[j][i], dist[i][j], tol)) {
        violations.push_back({ErrorKind::AsymmetricMatrix, i, j, 0});
      }
      if (dist[i][j] == 0) violations.push_back({ErrorKind::ZeroDistanceDistinctPoints, i, j, 0});
    }
  }
  if (violations.empty()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = i + 1; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i || j == k) continue;
          T via = dist[i][j] + dist[j][k];
          if (exceeds<T>(dist[i][k], via, tol)) {
            violations.push_back({ErrorKind::TriangleViolation, i, j, k});
          }
        }
      }
    }
  }
  if (!violations.empty()) throw MetricValidationError(std::move(violations));
  // Symmetrize float input so downstream code can rely on exact symmetry.
  if constexpr (!Arith<T>::exact) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) dist[j][i] = dist[i][j];
    }
  }
  return FiniteMetricSpace<T>(std::move(labels), std::move(dist));
}

template <Scalar T>
FiniteMetricSpace<T> validate_metric(Matrix<T> dist, double tol) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < dist.size(); ++i) labels.push_back(std::to_string(i));
  return validate_metric<T>(std::move(labels), std::move(dist), tol);
}

template <Scalar T>
AdditivityResult is_additive(const FiniteMetricSpace<T>& space, double tol) {
  const std::size_t n = space.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      for (std::size_t r = q + 1; r < n; ++r) {
        for (std::size_t s = r + 1; s < n; ++s) {
          std::array<T, 3> sums = {space(p, q) + space(r, s), space(p, r) + space(q, s),
                                   space(p, s) + space(q, r)};
          std::sort(sums.begin(), sums.end());
          T gap = sums[2] - sums[1];
          bool ok;
          if constexpr (Arith<T>::exact) {
            ok = tol == 0.0 ? gap == 0 : gap.get_d() <= tol;
          } else {
            ok = gap <= tol;
          }
          if (!ok) return {false, std::array<std::size_t, 4>{p, q, r, s}};
        }
      }
    }
  }
  return {};
}

template <Scalar T>
FiniteMetricSpace<T> restrict(const FiniteMetricSpace<T>& space,
                              const std::vector<std::string>& subset) {
  std::vector<std::size_t> rows;
  rows.reserve(subset.size());
  for (const auto& label : subset) rows.push_back(space.index_of(label));
  Matrix<T> dist(rows.size(), std::vector<T>(rows.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < rows.size(); ++b) dist[a][b] = space(rows[a], rows[b]);
  }
  return FiniteMetricSpace<T>(subset, std::move(dist));
}

template <Scalar T>
SixPointConfiguration<T> SixPointConfiguration<T>::in_order(FiniteMetricSpace<T> space) {
  if (space.size() != 6) {
    throw Error(ErrorKind::WrongPointCount, "a six-point configuration needs exactly six points");
  }
  return SixPointConfiguration<T>{std::move(space), {0, 1, 2, 3, 4, 5}};
}

FiniteMetricSpace<double> to_float(const FiniteMetricSpace<Rational>& space) {
  Matrix<double> dist(space.size(), std::vector<double>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t j = 0; j < space.size(); ++j) dist[i][j] = space(i, j).get_d();
  }
  return validate_metric<double>(space.labels(), std::move(dist));
}

#define OCTACOMP_INSTANTIATE(T)                                                              \
  template class FiniteMetricSpace<T>;                                                       \
  template FiniteMetricSpace<T> validate_metric<T>(std::vector<std::string>, Matrix<T>, double); \
  template FiniteMetricSpace<T> validate_metric<T>(Matrix<T>, double);                       \
  template AdditivityResult is_additive<T>(const FiniteMetricSpace<T>&, double);             \
  template FiniteMetricSpace<T> restrict<T>(const FiniteMetricSpace<T>&,                     \
                                            const std::vector<std::string>&);                \
  template struct SixPointConfiguration<T>;

OCTACOMP_INSTANTIATE(double)
OCTACOMP_INSTANTIATE(Rational)

#undef OCTACOMP_INSTANTIATE

}  // namespace octacomp
