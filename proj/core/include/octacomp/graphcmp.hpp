#pragma once

#include "octacomp/error.hpp"
#include "octacomp/metric.hpp"
#include "octacomp/numeric.hpp"

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace octacomp {

/// A simple undirected graph with labeled vertices.
class ComparisonGraph {
 public:
  /// Throws BadSize for asymmetric or reflexive adjacency.
  ComparisonGraph(std::vector<std::string> labels, std::vector<std::vector<bool>> adjacency);
  ComparisonGraph(std::vector<std::string> labels,
                  const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool adjacent(std::size_t i, std::size_t j) const { return adjacency_[i][j]; }
  std::size_t degree(std::size_t i) const;
  std::size_t edge_count() const;
  std::size_t index_of(const std::string& label) const;
  ComparisonGraph induced(const std::vector<std::size_t>& vertices) const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::vector<bool>> adjacency_;
};

/// Octahedron on x, y, z, x', y', z' (role order); diagonals are the only
/// non-edges.
ComparisonGraph octahedron_graph();

/// Vertices v0..v{n-1}. Throws BadSize for n < 3.
ComparisonGraph cycle_graph(std::size_t n);

/// The 48 vertex permutations preserving octahedron adjacency, identity first.
/// perm[r] is the role that role r is sent to.
std::vector<std::array<std::size_t, 6>> o3_automorphisms();

enum class Sense { Upper, Lower };

/// Model distance between graph vertices i and j must be <= bound (Upper,
/// adjacent) or >= bound (Lower, non-adjacent). Bounds are kept squared so
/// product metrics stay exact.
template <Scalar T>
struct Constraint {
  std::size_t i = 0;
  std::size_t j = 0;
  Sense sense = Sense::Upper;
  T bound_squared{};
  double bound = 0.0;
};

template <Scalar T>
struct ConstraintSet {
  std::vector<std::string> labels;  // graph vertex labels; model points follow this order
  std::vector<Constraint<T>> items;
};

/// `labeling[v]` names the space point assigned to graph vertex v. Throws
/// LabelingNotBijective, UnknownLabel.
template <Scalar T>
ConstraintSet<T> constraints(const ComparisonGraph& graph, const FiniteMetricSpace<T>& space,
                             const std::vector<std::string>& labeling);

/// Graph vertex v gets space row v.
template <Scalar T>
ConstraintSet<T> constraints(const ComparisonGraph& graph, const FiniteMetricSpace<T>& space);

/// From a matrix of squared source distances indexed by graph vertex.
template <Scalar T>
ConstraintSet<T> constraints_from_squared(const ComparisonGraph& graph, const Matrix<T>& squared);

/// Points in R^d, one per constrained label. Coord is double (float mode) or
/// QuadraticSurd (exact mode).
template <class Coord>
struct ModelConfiguration {
  std::vector<std::string> labels;
  std::vector<std::vector<Coord>> points;

  std::size_t dimension() const { return points.empty() ? 0 : points.front().size(); }
};

struct SlackEntry {
  std::size_t i = 0;
  std::size_t j = 0;
  Sense sense = Sense::Upper;
  double bound = 0.0;
  double distance = 0.0;
  double slack = 0.0;  // nonnegative = satisfied
};

struct VerificationReport {
  bool passed = true;
  bool exact = false;
  double min_slack = 0.0;
  std::vector<SlackEntry> entries;
  std::vector<SlackEntry> violations;
};

/// Float mode: slack = bound - distance (Upper) or distance - bound (Lower);
/// passes iff every slack >= -tol. Throws DimensionMismatch.
VerificationReport verify_model(const ConstraintSet<double>& constraints,
                                const ModelConfiguration<double>& model, double tol = kDefaultTol);

/// Exact mode: compares squared distances with squared bounds in exact
/// arithmetic (no tolerance). Slack values in the report are rounded.
VerificationReport verify_model(const ConstraintSet<Rational>& constraints,
                                const ModelConfiguration<QuadraticSurd>& model);

ModelConfiguration<double> to_float(const ModelConfiguration<QuadraticSurd>& model);
ConstraintSet<double> to_float(const ConstraintSet<Rational>& constraints);

}  // namespace octacomp
