#pragma once

// Independent reference computations and random generators for the tests.
// Nothing here calls into the library's geometry: tree distances come from
// Dijkstra on the raw edge list and Euclidean distances from coordinates.

#include "octacomp/builder.hpp"
#include "octacomp/graphcmp.hpp"
#include "octacomp/tree.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using octacomp::Rational;
using Rng = std::mt19937_64;

template <class T>
std::vector<std::optional<T>> vertex_distances(const octacomp::MetricTree<T>& tree, std::size_t source) {
  const std::size_t n = tree.vertex_count();
  std::vector<std::optional<T>> dist(n);
  std::vector<bool> done(n, false);
  dist[source] = T(0);
  for (std::size_t round = 0; round < n; ++round) {
    std::optional<std::size_t> best;
    for (std::size_t v = 0; v < n; ++v) {
      if (!done[v] && dist[v] && (!best || *dist[v] < *dist[*best])) best = v;
    }
    if (!best) break;
    done[*best] = true;
    for (const auto& e : tree.edges()) {
      for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
        if (a != *best) continue;
        const T through = *dist[a] + e.length;
        if (!dist[b] || through < *dist[b]) dist[b] = through;
      }
    }
  }
  return dist;
}

// Ends of a tree point with the distance to each: a vertex is its own end.
template <class T>
std::vector<std::pair<std::size_t, T>> anchors(const octacomp::MetricTree<T>& tree,
                                               const octacomp::TreePoint<T>& p) {
  if (p.is_vertex()) return {{p.index, T(0)}};
  const auto& e = tree.edges()[p.index];
  return {{e.u, p.offset}, {e.v, T(e.length - p.offset)}};
}

template <class T>
T tree_distance(const octacomp::MetricTree<T>& tree, const octacomp::TreePoint<T>& p,
                const octacomp::TreePoint<T>& q) {
  if (!p.is_vertex() && !q.is_vertex() && p.index == q.index) {
    return p.offset < q.offset ? T(q.offset - p.offset) : T(p.offset - q.offset);
  }
  std::optional<T> best;
  for (const auto& [a, da] : anchors(tree, p)) {
    const auto from_a = vertex_distances(tree, a);
    for (const auto& [b, db] : anchors(tree, q)) {
      const T total = da + *from_a[b] + db;
      if (!best || total < *best) best = total;
    }
  }
  return *best;
}

template <class T>
std::array<std::array<T, 6>, 6> tree_pairwise(const octacomp::TreeSixConfig<T>& cfg) {
  std::array<std::array<T, 6>, 6> d{};
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) d[i][j] = tree_distance(cfg.tree, cfg.points[i], cfg.points[j]);
  }
  return d;
}

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

inline std::vector<std::vector<double>> model_distances(const octacomp::ModelConfiguration<double>& m) {
  const std::size_t n = m.points.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = euclid(m.points[i], m.points[j]);
  }
  return d;
}

// Octahedron conditions checked directly from coordinates: partners (r, r+3)
// may not shrink, every other pair may not grow.
inline double octahedron_slack(const octacomp::ModelConfiguration<double>& m, const std::vector<std::vector<double>>& source) {
  const auto d = model_distances(m);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      const double slack = j == i + 3 ? d[i][j] - source[i][j] : source[i][j] - d[i][j];
      worst = std::min(worst, slack);
    }
  }
  return worst;
}

// mpq_class(a, b) is not reduced, and comparisons assume reduced operands.
inline Rational q(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

inline Rational random_length(Rng& rng, int denominator = 16, int max_units = 64) {
  return q(std::uniform_int_distribution<int>(1, max_units)(rng), denominator);
}

// Random tree with rational lengths and six points, some on vertices, some
// inside edges and some repeated.
inline octacomp::TreeSixConfig<Rational> random_tree_config(Rng& rng, std::size_t max_vertices = 12) {
  const std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_vertices)(rng);
  std::vector<std::string> names;
  std::vector<octacomp::TreeEdge<Rational>> edges;
  for (std::size_t v = 0; v < n; ++v) names.push_back("n" + std::to_string(v));
  for (std::size_t v = 1; v < n; ++v) {
    edges.push_back({std::uniform_int_distribution<std::size_t>(0, v - 1)(rng), v, random_length(rng)});
  }
  octacomp::MetricTree<Rational> tree(names, edges);
  std::array<octacomp::TreePoint<Rational>, 6> pts;
  for (std::size_t r = 0; r < 6; ++r) {
    const int style = std::uniform_int_distribution<int>(0, 9)(rng);
    if (r > 0 && style == 0) {
      pts[r] = pts[std::uniform_int_distribution<std::size_t>(0, r - 1)(rng)];
    } else if (style <= 3) {
      pts[r] = tree.vertex_point(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
    } else {
      const std::size_t e = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
      const Rational t = edges[e].length * q(std::uniform_int_distribution<int>(0, 8)(rng), 8);
      pts[r] = tree.edge_point(e, t);
    }
  }
  return {tree, pts};
}

inline std::vector<std::vector<double>> random_points(Rng& rng, std::size_t n, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (auto& p : pts) {
    for (double& v : p) v = u(rng);
  }
  return pts;
}

inline std::vector<std::vector<double>> distance_matrix(const std::vector<std::vector<double>>& pts) {
  std::vector<std::vector<double>> d(pts.size(), std::vector<double>(pts.size(), 0.0));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) d[i][j] = euclid(pts[i], pts[j]);
  }
  return d;
}

inline std::vector<std::vector<double>> random_symmetric(Rng& rng, std::size_t n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) m[i][j] = m[j][i] = u(rng);
  }
  return m;
}

}  // namespace oracle
