#pragma once

#include "octacomp/error.hpp"
#include "octacomp/metric.hpp"
#include "octacomp/numeric.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace octacomp {

template <Scalar T>
struct TreeEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  T length{};
};

/// A point of a metric tree: a vertex, or an interior point of an edge at
/// `offset` from the edge's `u` end. Points obtained from MetricTree are
/// canonical: offsets are strictly inside (0, length), so two canonical
/// points in exact mode are equal iff they are the same point.
template <Scalar T>
struct TreePoint {
  enum class Kind { Vertex, Edge };
  Kind kind = Kind::Vertex;
  std::size_t index = 0;  // vertex id or edge id
  T offset{};

  bool is_vertex() const { return kind == Kind::Vertex; }
  friend bool operator==(const TreePoint& a, const TreePoint& b) {
    if (a.kind != b.kind || a.index != b.index) return false;
    return a.is_vertex() || a.offset == b.offset;
  }
};

template <Scalar T>
struct Geodesic {
  TreePoint<T> p;
  TreePoint<T> q;
  T length{};
  std::vector<std::size_t> vertex_path;  // interior vertices, ordered from p to q
};

/// A (possibly one-point) sub-segment [u, v] of a tree.
template <Scalar T>
struct Segment {
  TreePoint<T> u;
  TreePoint<T> v;
};

/// A finite weighted tree. Immutable; structural edits return new trees.
/// Rooted at vertex 0 internally so distances reduce to depth arithmetic.
template <Scalar T>
class MetricTree {
 public:
  /// Throws InvalidTree unless the edges form a spanning tree with positive
  /// lengths.
  MetricTree(std::vector<std::string> vertex_names, std::vector<TreeEdge<T>> edges);

  std::size_t vertex_count() const { return names_.size(); }
  const std::vector<std::string>& vertex_names() const { return names_; }
  const std::vector<TreeEdge<T>>& edges() const { return edges_; }
  std::size_t find_vertex(const std::string& name) const;

  TreePoint<T> vertex_point(std::size_t v) const;
  /// Canonicalizes offsets 0 and length to vertices. Throws
  /// ParameterOutOfRange for offsets outside [0, length].
  TreePoint<T> edge_point(std::size_t edge, const T& offset) const;
  /// Same, addressing the edge by its endpoints in either orientation.
  TreePoint<T> edge_point(std::size_t from, std::size_t to, const T& offset) const;
  /// Throws PointNotInTree.
  void check(const TreePoint<T>& p) const;

  T distance(const TreePoint<T>& p, const TreePoint<T>& q) const;
  bool same_point(const TreePoint<T>& p, const TreePoint<T>& q) const;
  Geodesic<T> geodesic(const TreePoint<T>& p, const TreePoint<T>& q) const;
  /// The point at arclength t from g.p. Throws ParameterOutOfRange.
  TreePoint<T> point_at(const Geodesic<T>& g, const T& t) const;
  /// The unique point on all three geodesics [pq], [qr], [pr].
  TreePoint<T> median(const TreePoint<T>& p, const TreePoint<T>& q, const TreePoint<T>& r) const;
  /// Nearest point of g to p (the gate).
  TreePoint<T> project(const TreePoint<T>& p, const Geodesic<T>& g) const;
  bool on_geodesic(const TreePoint<T>& p, const Geodesic<T>& g) const;
  /// Maximal common sub-segment, oriented like g1; nullopt when disjoint.
  std::optional<Segment<T>> intersect(const Geodesic<T>& g1, const Geodesic<T>& g2) const;

  /// Inserts a vertex at `at` (no-op for vertices) and rewrites `points` into
  /// the new tree. The new (or existing) vertex id is stored in `vertex`.
  MetricTree subdivided(const TreePoint<T>& at, std::span<TreePoint<T>> points,
                        std::size_t& vertex) const;
  /// Collapses the path between vertices a and b to a single vertex, keeping
  /// a's name, and rewrites `points` into the new tree.
  MetricTree contracted(std::size_t a, std::size_t b, std::span<TreePoint<T>> points) const;

 private:
  struct Loc {
    std::size_t c;  // point lies on the edge from c towards parent(c)
    T t;            // distance above c
  };

  Loc locate(const TreePoint<T>& p) const;
  TreePoint<T> from_loc(std::size_t c, const T& t) const;
  T height(const Loc& loc) const;
  bool is_ancestor(std::size_t a, std::size_t b) const;  // a is b or above b
  std::size_t lca(std::size_t a, std::size_t b) const;
  TreePoint<T> climb(std::size_t c, T t, T amount) const;
  std::vector<std::size_t> path_between_vertices(std::size_t a, std::size_t b) const;

  std::vector<std::string> names_;
  std::vector<TreeEdge<T>> edges_;
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> parent_edge_;
  std::vector<T> depth_;
  std::vector<std::size_t> level_;
};

/// Six tree points indexed by role (x, y, z, x', y', z').
template <Scalar T>
struct TreeSixConfig {
  MetricTree<T> tree;
  std::array<TreePoint<T>, 6> points;

  std::array<std::array<T, 6>, 6> pairwise() const;
  Geodesic<T> diagonal(std::size_t i) const {
    return tree.geodesic(points[i], points[partner(i)]);
  }
};

struct Tripod {
  static constexpr const char* name = "tripod";
};
struct WithinDiagonal {
  std::size_t host = 0;  // 0: [xx'], 1: [yy'], 2: [zz']
};

template <Scalar T>
struct CaseAnalysis {
  std::array<Geodesic<T>, 3> diagonals;
  /// [xx']∩[yy'], [yy']∩[zz'], [zz']∩[xx'].
  std::array<std::optional<Segment<T>>, 3> intersections;
  std::variant<WithinDiagonal, Tripod> shape;
  std::optional<TreePoint<T>> center;  // set for Tripod
};

/// Throws DisconnectedDiagonals when the union of the diagonals is not
/// connected.
template <Scalar T>
CaseAnalysis<T> classify_configuration(const TreeSixConfig<T>& cfg);

template <Scalar T>
struct ShrinkStep {
  T connector_length{};
  std::array<std::array<T, 6>, 6> before;
  std::array<std::array<T, 6>, 6> after;
};

template <Scalar T>
struct ShrinkResult {
  TreeSixConfig<T> cfg;
  std::vector<ShrinkStep<T>> steps;
};

/// Contracts minimizing connector arcs until the diagonals' union is
/// connected. Diagonal lengths are preserved, other distances never grow.
template <Scalar T>
ShrinkResult<T> shrink_to_connected(const TreeSixConfig<T>& cfg);

template <Scalar T>
struct TreeReconstruction {
  MetricTree<T> tree;
  std::vector<TreePoint<T>> points;  // one per label of the input space
};

/// Builds a tree realizing an additive metric by attaching one point at a
/// time at its Gromov-product position. Throws NotAdditive.
template <Scalar T>
TreeReconstruction<T> tree_from_additive_metric(const FiniteMetricSpace<T>& space,
                                                double tol = 0.0);

MetricTree<double> to_float(const MetricTree<Rational>& tree);
TreePoint<double> to_float(const TreePoint<Rational>& point);
TreeSixConfig<double> to_float(const TreeSixConfig<Rational>& cfg);

}  // namespace octacomp
