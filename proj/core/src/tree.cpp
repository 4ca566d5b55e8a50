#include "octacomp/tree.hpp"

#include <algorithm>
#include <type_traits>
#include <numeric>

namespace octacomp {

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

template <Scalar T>
T clamp_to(const T& value, const T& lo, const T& hi) {
  if (value < lo) return lo;
  if (value > hi) return hi;
  return value;
}

}  // namespace

template <Scalar T>
MetricTree<T>::MetricTree(std::vector<std::string> vertex_names, std::vector<TreeEdge<T>> edges)
    : names_(std::move(vertex_names)), edges_(std::move(edges)) {
  const std::size_t n = names_.size();
  if (n == 0) throw Error(ErrorKind::InvalidTree, "a tree needs at least one vertex");
  if (edges_.size() != n - 1) {
    throw Error(ErrorKind::InvalidTree, "a tree on " + std::to_string(n) + " vertices needs " +
                                            std::to_string(n - 1) + " edges");
  }
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency(n);
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    // mpq comparisons assume canonical form; callers may hand us 52/16.
    if constexpr (std::is_same_v<T, Rational>) edges_[e].length.canonicalize();
    const auto& edge = edges_[e];
    if (edge.u >= n || edge.v >= n || edge.u == edge.v) {
      throw Error(ErrorKind::InvalidTree, "edge " + std::to_string(e) + " has bad endpoints");
    }
    if (!(edge.length > 0)) {
      throw Error(ErrorKind::InvalidTree, "edge " + std::to_string(e) + " has nonpositive length");
    }
    adjacency[edge.u].emplace_back(edge.v, e);
    adjacency[edge.v].emplace_back(edge.u, e);
  }
  parent_.assign(n, kNone);
  parent_edge_.assign(n, kNone);
  depth_.assign(n, T(0));
  level_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack = {0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (auto [w, e] : adjacency[v]) {
      if (seen[w]) continue;
      seen[w] = true;
      ++reached;
      parent_[w] = v;
      parent_edge_[w] = e;
      depth_[w] = depth_[v] + edges_[e].length;
      level_[w] = level_[v] + 1;
      stack.push_back(w);
    }
  }
  if (reached != n) throw Error(ErrorKind::InvalidTree, "edges do not connect all vertices");
}

template <Scalar T>
std::size_t MetricTree<T>::find_vertex(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw Error(ErrorKind::UnknownLabel, "unknown vertex '" + name + "'");
  return static_cast<std::size_t>(it - names_.begin());
}

template <Scalar T>
TreePoint<T> MetricTree<T>::vertex_point(std::size_t v) const {
  if (v >= names_.size()) throw Error(ErrorKind::PointNotInTree, "vertex id out of range");
  return TreePoint<T>{TreePoint<T>::Kind::Vertex, v, T(0)};
}

template <Scalar T>
TreePoint<T> MetricTree<T>::edge_point(std::size_t edge, const T& offset) const {
  if (edge >= edges_.size()) throw Error(ErrorKind::PointNotInTree, "edge id out of range");
  const auto& e = edges_[edge];
  if (Arith<T>::le(offset, T(0))) {
    if (Arith<T>::lt(offset, T(0))) {
      throw Error(ErrorKind::ParameterOutOfRange, "edge offset below zero");
    }
    return vertex_point(e.u);
  }
  if (Arith<T>::le(e.length, offset)) {
    if (Arith<T>::lt(e.length, offset)) {
      throw Error(ErrorKind::ParameterOutOfRange, "edge offset beyond edge length");
    }
    return vertex_point(e.v);
  }
  TreePoint<T> p{TreePoint<T>::Kind::Edge, edge, offset};
  if constexpr (std::is_same_v<T, Rational>) p.offset.canonicalize();
  return p;
}

template <Scalar T>
TreePoint<T> MetricTree<T>::edge_point(std::size_t from, std::size_t to, const T& offset) const {
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (edges_[e].u == from && edges_[e].v == to) return edge_point(e, offset);
    if (edges_[e].u == to && edges_[e].v == from) return edge_point(e, T(edges_[e].length - offset));
  }
  throw Error(ErrorKind::PointNotInTree, "no edge between the given vertices");
}

template <Scalar T>
void MetricTree<T>::check(const TreePoint<T>& p) const {
  if (p.is_vertex()) {
    if (p.index >= names_.size()) throw Error(ErrorKind::PointNotInTree, "vertex id out of range");
    return;
  }
  if (p.index >= edges_.size()) throw Error(ErrorKind::PointNotInTree, "edge id out of range");
  if (p.offset < 0 || p.offset > edges_[p.index].length) {
    throw Error(ErrorKind::PointNotInTree, "edge offset outside the edge");
  }
}

template <Scalar T>
typename MetricTree<T>::Loc MetricTree<T>::locate(const TreePoint<T>& p) const {
  check(p);
  if (p.is_vertex()) return Loc{p.index, T(0)};
  const auto& e = edges_[p.index];
  if (parent_[e.u] == e.v && parent_edge_[e.u] == p.index) return Loc{e.u, p.offset};
  return Loc{e.v, T(e.length - p.offset)};
}

template <Scalar T>
TreePoint<T> MetricTree<T>::from_loc(std::size_t c, const T& t) const {
  if (Arith<T>::is_zero(t) || parent_[c] == kNone) return vertex_point(c);
  const std::size_t e = parent_edge_[c];
  const auto& edge = edges_[e];
  if (edge.u == c) return edge_point(e, clamp_to<T>(t, T(0), edge.length));
  return edge_point(e, clamp_to<T>(T(edge.length - t), T(0), edge.length));
}

template <Scalar T>
T MetricTree<T>::height(const Loc& loc) const {
  return T(depth_[loc.c] - loc.t);
}

template <Scalar T>
bool MetricTree<T>::is_ancestor(std::size_t a, std::size_t b) const {
  while (level_[b] > level_[a]) b = parent_[b];
  return a == b;
}

template <Scalar T>
std::size_t MetricTree<T>::lca(std::size_t a, std::size_t b) const {
  while (level_[a] > level_[b]) a = parent_[a];
  while (level_[b] > level_[a]) b = parent_[b];
  while (a != b) {
    a = parent_[a];
    b = parent_[b];
  }
  return a;
}

template <Scalar T>
T MetricTree<T>::distance(const TreePoint<T>& p, const TreePoint<T>& q) const {
  const Loc a = locate(p);
  const Loc b = locate(q);
  if (a.c == b.c) return Arith<T>::abs(T(a.t - b.t));
  if (is_ancestor(a.c, b.c)) return T(height(b) - height(a));
  if (is_ancestor(b.c, a.c)) return T(height(a) - height(b));
  const std::size_t l = lca(a.c, b.c);
  return T(height(a) + height(b) - 2 * depth_[l]);
}

template <Scalar T>
bool MetricTree<T>::same_point(const TreePoint<T>& p, const TreePoint<T>& q) const {
  if constexpr (Arith<T>::exact) {
    return p == q;
  } else {
    return Arith<T>::is_zero(distance(p, q));
  }
}

template <Scalar T>
std::vector<std::size_t> MetricTree<T>::path_between_vertices(std::size_t a, std::size_t b) const {
  const std::size_t l = lca(a, b);
  std::vector<std::size_t> front;
  for (std::size_t v = a; v != l; v = parent_[v]) front.push_back(v);
  front.push_back(l);
  std::vector<std::size_t> back;
  for (std::size_t v = b; v != l; v = parent_[v]) back.push_back(v);
  front.insert(front.end(), back.rbegin(), back.rend());
  return front;
}

template <Scalar T>
Geodesic<T> MetricTree<T>::geodesic(const TreePoint<T>& p, const TreePoint<T>& q) const {
  Geodesic<T> g{p, q, distance(p, q), {}};
  const Loc a = locate(p);
  const Loc b = locate(q);
  if (a.c == b.c) return g;
  // Vertices met while climbing from `child` up to (not including) `stop`.
  auto climb_list = [&](std::size_t child, std::size_t stop) {
    std::vector<std::size_t> out;
    for (std::size_t v = parent_[child]; v != stop; v = parent_[v]) out.push_back(v);
    return out;
  };
  const bool a_positive = !Arith<T>::is_zero(a.t);
  const bool b_positive = !Arith<T>::is_zero(b.t);
  if (is_ancestor(a.c, b.c)) {
    auto up = climb_list(b.c, a.c);
    if (a_positive) up.push_back(a.c);
    g.vertex_path.assign(up.rbegin(), up.rend());
  } else if (is_ancestor(b.c, a.c)) {
    auto up = climb_list(a.c, b.c);
    if (b_positive) up.push_back(b.c);
    g.vertex_path = std::move(up);
  } else {
    const std::size_t l = lca(a.c, b.c);
    auto up = climb_list(a.c, l);
    up.push_back(l);
    auto down = climb_list(b.c, l);
    up.insert(up.end(), down.rbegin(), down.rend());
    g.vertex_path = std::move(up);
  }
  return g;
}

template <Scalar T>
TreePoint<T> MetricTree<T>::climb(std::size_t c, T t, T amount) const {
  while (true) {
    if (parent_[c] == kNone) return vertex_point(c);
    const T& len = edges_[parent_edge_[c]].length;
    T remaining = len - t;
    if (Arith<T>::lt(amount, remaining)) return from_loc(c, T(t + amount));
    amount -= remaining;
    c = parent_[c];
    t = 0;
    if (Arith<T>::le(amount, T(0))) return vertex_point(c);
  }
}

template <Scalar T>
TreePoint<T> MetricTree<T>::point_at(const Geodesic<T>& g, const T& t) const {
  if (Arith<T>::lt(t, T(0)) || Arith<T>::lt(g.length, t)) {
    throw Error(ErrorKind::ParameterOutOfRange, "geodesic parameter outside [0, length]");
  }
  const T s = clamp_to<T>(t, T(0), g.length);
  const Loc a = locate(g.p);
  const Loc b = locate(g.q);
  T top;
  if (a.c == b.c) {
    top = std::min(height(a), height(b));
  } else if (is_ancestor(a.c, b.c)) {
    top = height(a);
  } else if (is_ancestor(b.c, a.c)) {
    top = height(b);
  } else {
    top = depth_[lca(a.c, b.c)];
  }
  const T up_from_p = height(a) - top;
  if (s <= up_from_p) return climb(a.c, a.t, s);
  T rest = g.length - s;
  if (rest < 0) rest = 0;
  return climb(b.c, b.t, rest);
}

template <Scalar T>
TreePoint<T> MetricTree<T>::median(const TreePoint<T>& p, const TreePoint<T>& q,
                                   const TreePoint<T>& r) const {
  const Geodesic<T> g = geodesic(p, q);
  T gromov = Arith<T>::half(T(g.length + distance(p, r) - distance(q, r)));
  return point_at(g, clamp_to<T>(gromov, T(0), g.length));
}

template <Scalar T>
TreePoint<T> MetricTree<T>::project(const TreePoint<T>& p, const Geodesic<T>& g) const {
  return median(p, g.p, g.q);
}

template <Scalar T>
bool MetricTree<T>::on_geodesic(const TreePoint<T>& p, const Geodesic<T>& g) const {
  return Arith<T>::eq(T(distance(g.p, p) + distance(p, g.q)), g.length);
}

// Decision table, with u = gate of g1.p on g2 and v = gate of g1.q on g2:
//   u != v            -> g1 runs through u and v, the common part is [u, v]
//   u == v, u on g1   -> single common point
//   u == v, u off g1  -> disjoint (u is where g1 would attach to g2)
template <Scalar T>
std::optional<Segment<T>> MetricTree<T>::intersect(const Geodesic<T>& g1,
                                                   const Geodesic<T>& g2) const {
  TreePoint<T> u = project(g1.p, g2);
  TreePoint<T> v = project(g1.q, g2);
  if (!same_point(u, v)) return Segment<T>{u, v};
  if (on_geodesic(u, g1)) return Segment<T>{u, u};
  return std::nullopt;
}

template <Scalar T>
MetricTree<T> MetricTree<T>::subdivided(const TreePoint<T>& at, std::span<TreePoint<T>> points,
                                        std::size_t& vertex) const {
  check(at);
  if (at.is_vertex()) {
    vertex = at.index;
    return *this;
  }
  const std::size_t e = at.index;
  const TreeEdge<T> old = edges_[e];
  auto names = names_;
  auto edges = edges_;
  const std::size_t w = names.size();
  names.push_back(names_[old.u] + "~" + names_[old.v]);
  edges[e] = TreeEdge<T>{old.u, w, at.offset};
  const std::size_t tail = edges.size();
  edges.push_back(TreeEdge<T>{w, old.v, T(old.length - at.offset)});
  MetricTree result(std::move(names), std::move(edges));
  for (auto& p : points) {
    if (p.is_vertex() || p.index != e) continue;
    if (Arith<T>::eq(p.offset, at.offset)) {
      p = result.vertex_point(w);
    } else if (p.offset < at.offset) {
      p = result.edge_point(e, p.offset);
    } else {
      p = result.edge_point(tail, T(p.offset - at.offset));
    }
  }
  vertex = w;
  return result;
}

template <Scalar T>
MetricTree<T> MetricTree<T>::contracted(std::size_t a, std::size_t b,
                                        std::span<TreePoint<T>> points) const {
  if (a >= names_.size() || b >= names_.size()) {
    throw Error(ErrorKind::PointNotInTree, "vertex id out of range");
  }
  const auto path = path_between_vertices(a, b);
  std::vector<bool> merged(names_.size(), false);
  for (std::size_t v : path) merged[v] = true;

  std::vector<std::size_t> new_id(names_.size(), kNone);
  std::vector<std::string> names;
  for (std::size_t v = 0; v < names_.size(); ++v) {
    if (merged[v] && v != a) continue;
    new_id[v] = names.size();
    names.push_back(names_[v]);
  }
  for (std::size_t v : path) new_id[v] = new_id[a];

  std::vector<std::size_t> new_edge(edges_.size(), kNone);
  std::vector<TreeEdge<T>> edges;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& edge = edges_[e];
    if (merged[edge.u] && merged[edge.v]) continue;  // on the contracted path
    new_edge[e] = edges.size();
    edges.push_back(TreeEdge<T>{new_id[edge.u], new_id[edge.v], edge.length});
  }
  MetricTree result(std::move(names), std::move(edges));
  for (auto& p : points) {
    if (p.is_vertex()) {
      p = result.vertex_point(new_id[p.index]);
    } else if (new_edge[p.index] == kNone) {
      p = result.vertex_point(new_id[a]);
    } else {
      p = result.edge_point(new_edge[p.index], p.offset);
    }
  }
  return result;
}

template <Scalar T>
std::array<std::array<T, 6>, 6> TreeSixConfig<T>::pairwise() const {
  std::array<std::array<T, 6>, 6> d;
  for (std::size_t i = 0; i < 6; ++i) {
    d[i][i] = 0;
    for (std::size_t j = i + 1; j < 6; ++j) {
      d[i][j] = tree.distance(points[i], points[j]);
      d[j][i] = d[i][j];
    }
  }
  return d;
}

namespace {

struct Components {
  std::array<std::size_t, 3> root = {0, 1, 2};
  std::size_t find(std::size_t i) {
    while (root[i] != i) i = root[i];
    return i;
  }
  void join(std::size_t a, std::size_t b) { root[find(a)] = find(b); }
  std::size_t count() {
    std::size_t c = 0;
    for (std::size_t i = 0; i < 3; ++i) c += find(i) == i ? 1 : 0;
    return c;
  }
};

}  // namespace

template <Scalar T>
CaseAnalysis<T> classify_configuration(const TreeSixConfig<T>& cfg) {
  const auto& tree = cfg.tree;
  CaseAnalysis<T> out{{cfg.diagonal(0), cfg.diagonal(1), cfg.diagonal(2)}, {}, WithinDiagonal{}, {}};
  Components components;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t j = (i + 1) % 3;
    out.intersections[i] = tree.intersect(out.diagonals[i], out.diagonals[j]);
    if (out.intersections[i]) components.join(i, j);
  }
  if (components.count() != 1) {
    throw Error(ErrorKind::DisconnectedDiagonals,
                "the union of the diagonals is disconnected; shrink first");
  }
  for (std::size_t host = 0; host < 3; ++host) {
    bool contained = true;
    for (const auto& seg : out.intersections) {
      if (!seg) continue;
      if (!tree.on_geodesic(seg->u, out.diagonals[host]) ||
          !tree.on_geodesic(seg->v, out.diagonals[host])) {
        contained = false;
        break;
      }
    }
    if (contained) {
      out.shape = WithinDiagonal{host};
      return out;
    }
  }
  // Not within a single diagonal, so every pairwise intersection is
  // nonempty and (Helly) all three diagonals share a point; that common part
  // is a single point, the tripod center.
  const Segment<T>& first = *out.intersections[0];
  auto common = tree.intersect(tree.geodesic(first.u, first.v), out.diagonals[2]);
  if (!common) {
    throw Error(ErrorKind::NotTripod, "pairwise intersecting diagonals without a common point");
  }
  out.shape = Tripod{};
  out.center = common->u;
  return out;
}

template <Scalar T>
ShrinkResult<T> shrink_to_connected(const TreeSixConfig<T>& input) {
  ShrinkResult<T> result{input, {}};
  while (true) {
    auto& cfg = result.cfg;
    const auto& tree = cfg.tree;
    std::array<Geodesic<T>, 3> diag = {cfg.diagonal(0), cfg.diagonal(1), cfg.diagonal(2)};
    Components components;
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        if (tree.intersect(diag[i], diag[j])) components.join(i, j);
      }
    }
    if (components.count() == 1) return result;

    // Minimizing connector between diagonals lying in different components:
    // the gate of one diagonal on the other, and back.
    std::optional<std::pair<TreePoint<T>, TreePoint<T>>> best;
    T best_length{};
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = i + 1; j < 3; ++j) {
        if (components.find(i) == components.find(j)) continue;
        TreePoint<T> gate = tree.project(diag[i].p, diag[j]);
        TreePoint<T> near = tree.project(gate, diag[i]);
        T length = tree.distance(near, gate);
        if (!best || length < best_length) {
          best = std::make_pair(near, gate);
          best_length = length;
        }
      }
    }

    ShrinkStep<T> step;
    step.connector_length = best_length;
    step.before = cfg.pairwise();

    std::array<TreePoint<T>, 7> tracked;
    std::copy(cfg.points.begin(), cfg.points.end(), tracked.begin());
    tracked[6] = best->second;
    std::size_t va = 0;
    std::size_t vb = 0;
    MetricTree<T> t1 = tree.subdivided(best->first, std::span<TreePoint<T>>(tracked), va);
    MetricTree<T> t2 = t1.subdivided(tracked[6], std::span<TreePoint<T>>(tracked.data(), 6), vb);
    MetricTree<T> t3 = t2.contracted(va, vb, std::span<TreePoint<T>>(tracked.data(), 6));
    std::array<TreePoint<T>, 6> pts;
    std::copy_n(tracked.begin(), 6, pts.begin());
    cfg = TreeSixConfig<T>{std::move(t3), pts};
    step.after = cfg.pairwise();
    result.steps.push_back(std::move(step));
  }
}

template <Scalar T>
TreeReconstruction<T> tree_from_additive_metric(const FiniteMetricSpace<T>& space, double tol) {
  const std::size_t n = space.size();
  if (n == 0) throw Error(ErrorKind::BadSize, "cannot reconstruct a tree from an empty space");
  auto additive = is_additive(space, tol);
  if (!additive.additive) {
    const auto& w = *additive.witness;
    throw Error(ErrorKind::NotAdditive, "four-point condition fails on (" + space.label(w[0]) + ", " +
                                            space.label(w[1]) + ", " + space.label(w[2]) + ", " +
                                            space.label(w[3]) + ")");
  }
  const T zero_cut = Arith<T>::exact ? T(0) : T(Arith<T>::from_double(tol));
  MetricTree<T> tree({space.label(0)}, {});
  std::vector<TreePoint<T>> placed = {tree.vertex_point(0)};
  for (std::size_t k = 1; k < n; ++k) {
    // Distance from k to the subtree spanned by the placed points.
    std::size_t bi = 0;
    std::size_t bj = 0;
    T pendant = space(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i; j < k; ++j) {
        T g = Arith<T>::half(T(space(k, i) + space(k, j) - space(i, j)));
        if (g < pendant) {
          pendant = g;
          bi = i;
          bj = j;
        }
      }
    }
    const Geodesic<T> g = tree.geodesic(placed[bi], placed[bj]);
    T along = space(k, bi) - pendant;
    if (along < 0) along = 0;
    if (along > g.length) along = g.length;
    TreePoint<T> attach = tree.point_at(g, along);
    if (pendant <= zero_cut) {
      placed.push_back(attach);
      continue;
    }
    std::size_t w = 0;
    tree = tree.subdivided(attach, std::span<TreePoint<T>>(placed), w);
    auto names = tree.vertex_names();
    auto edges = tree.edges();
    std::string name = space.label(k);
    while (std::find(names.begin(), names.end(), name) != names.end()) name += "'";
    names.push_back(name);
    edges.push_back(TreeEdge<T>{w, names.size() - 1, pendant});
    tree = MetricTree<T>(std::move(names), std::move(edges));
    placed.push_back(tree.vertex_point(tree.vertex_count() - 1));
  }
  // Round trip: the placement must reproduce the input.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      T d = tree.distance(placed[i], placed[j]);
      bool ok;
      if constexpr (Arith<T>::exact) {
        ok = d == space(i, j);
      } else {
        ok = std::abs(d - space(i, j)) <= std::max(tol, 1e-9) * std::max(1.0, space(i, j));
      }
      if (!ok) {
        throw Error(ErrorKind::NotAdditive, "reconstructed tree does not reproduce d(" +
                                                space.label(i) + ", " + space.label(j) + ")");
      }
    }
  }
  return TreeReconstruction<T>{std::move(tree), std::move(placed)};
}

MetricTree<double> to_float(const MetricTree<Rational>& tree) {
  std::vector<TreeEdge<double>> edges;
  for (const auto& e : tree.edges()) edges.push_back({e.u, e.v, e.length.get_d()});
  return MetricTree<double>(tree.vertex_names(), std::move(edges));
}

TreePoint<double> to_float(const TreePoint<Rational>& point) {
  return TreePoint<double>{point.is_vertex() ? TreePoint<double>::Kind::Vertex
                                             : TreePoint<double>::Kind::Edge,
                           point.index, point.offset.get_d()};
}

TreeSixConfig<double> to_float(const TreeSixConfig<Rational>& cfg) {
  TreeSixConfig<double> out{to_float(cfg.tree), {}};
  for (std::size_t i = 0; i < 6; ++i) out.points[i] = to_float(cfg.points[i]);
  return out;
}

#define OCTACOMP_INSTANTIATE(T)                                                               \
  template class MetricTree<T>;                                                               \
  template struct TreeSixConfig<T>;                                                           \
  template CaseAnalysis<T> classify_configuration<T>(const TreeSixConfig<T>&);                \
  template ShrinkResult<T> shrink_to_connected<T>(const TreeSixConfig<T>&);                   \
  template TreeReconstruction<T> tree_from_additive_metric<T>(const FiniteMetricSpace<T>&, double);

OCTACOMP_INSTANTIATE(double)
OCTACOMP_INSTANTIATE(Rational)

#undef OCTACOMP_INSTANTIATE

}  // namespace octacomp
