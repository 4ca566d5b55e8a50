#include "octacomp/builder.hpp"

#include <algorithm>
#include <cmath>

namespace octacomp {

namespace {

template <Scalar T>
using Points = std::array<TreePoint<T>, 6>;

using Perm = std::array<std::size_t, 6>;

template <Scalar T>
PairwiseDistances<T> pairwise(const MetricTree<T>& tree, const Points<T>& pts) {
  PairwiseDistances<T> d;
  for (std::size_t i = 0; i < 6; ++i) {
    d[i][i] = 0;
    for (std::size_t j = i + 1; j < 6; ++j) {
      d[i][j] = tree.distance(pts[i], pts[j]);
      d[j][i] = d[i][j];
    }
  }
  return d;
}

// Relabeled configuration: new role r holds the point of old role perm[r].
template <class V>
std::array<V, 6> relabel(const std::array<V, 6>& values, const Perm& perm) {
  std::array<V, 6> out;
  for (std::size_t r = 0; r < 6; ++r) out[r] = values[perm[r]];
  return out;
}

Perm compose(const Perm& outer, const Perm& inner) {
  Perm out{};
  for (std::size_t r = 0; r < 6; ++r) out[r] = outer[inner[r]];
  return out;
}

template <Scalar T>
PairwiseDistances<T> unpermute(const PairwiseDistances<T>& d, const Perm& perm) {
  PairwiseDistances<T> out;
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t s = 0; s < 6; ++s) out[perm[r]][perm[s]] = d[r][s];
  }
  return out;
}

template <class Coord>
ModelConfiguration<Coord> unpermute_model(const ModelConfiguration<Coord>& model, const Perm& perm) {
  ModelConfiguration<Coord> out{model.labels, std::vector<std::vector<Coord>>(6)};
  for (std::size_t r = 0; r < 6; ++r) out.points[perm[r]] = model.points[r];
  return out;
}

template <Scalar T>
bool monotone_step(const PairwiseDistances<T>& before, const PairwiseDistances<T>& after) {
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      if (j == partner(i)) {
        if (!Arith<T>::eq(before[i][j], after[i][j])) return false;
      } else if (!Arith<T>::le(after[i][j], before[i][j])) {
        return false;
      }
    }
  }
  return true;
}

std::vector<std::string> role_labels() { return {kRoleNames.begin(), kRoleNames.end()}; }

template <Scalar T>
ConstraintSet<T> o3_constraints_for(const MetricTree<T>& tree, const Points<T>& pts) {
  const auto d = pairwise(tree, pts);
  Matrix<T> squared(6, std::vector<T>(6));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) squared[i][j] = d[i][j] * d[i][j];
  }
  return constraints_from_squared(octahedron_graph(), squared);
}

// Planar point stored as (x, y) with actual coordinates (x, y * height).
template <Scalar T>
struct PlanePoint {
  T x{};
  T y{};
};

template <Scalar T>
PlanePoint<T> along(const PlanePoint<T>& from, const PlanePoint<T>& away_from, const T& side,
                    const T& amount) {
  // from + amount * unit(from - away_from); unit is (1, 0) on a degenerate side.
  if (Arith<T>::is_zero(side)) return {T(from.x + amount), from.y};
  return {T(from.x + amount * (from.x - away_from.x) / side),
          T(from.y + amount * (from.y - away_from.y) / side)};
}

template <Scalar T>
TreeModel<T> emit_planar(const std::array<PlanePoint<T>, 6>& pts, const T& height_squared) {
  TreeModel<T> model{role_labels(), {}};
  if constexpr (Arith<T>::exact) {
    const QuadraticSurd height = exact_sqrt(height_squared);
    for (const auto& p : pts) model.points.push_back({QuadraticSurd(p.x), QuadraticSurd(p.y) * height});
  } else {
    const double height = std::sqrt(std::max(0.0, height_squared));
    for (const auto& p : pts) model.points.push_back({p.x, p.y * height});
  }
  return model;
}

template <Scalar T>
TreeModel<T> emit_line(const std::array<T, 6>& coords) {
  TreeModel<T> model{role_labels(), {}};
  for (const auto& c : coords) {
    if constexpr (Arith<T>::exact) {
      model.points.push_back({QuadraticSurd(c)});
    } else {
      model.points.push_back({c});
    }
  }
  return model;
}

// Copies each coincidence class's representative coordinates to its members.
template <class Coord>
ModelConfiguration<Coord> restore_coincident(ModelConfiguration<Coord> model,
                                             const std::vector<std::vector<std::size_t>>& classes) {
  for (const auto& cls : classes) {
    for (std::size_t k = 1; k < cls.size(); ++k) model.points[cls[k]] = model.points[cls.front()];
  }
  return model;
}

}  // namespace

template <Scalar T>
VerificationReport verify_tree_model(const ConstraintSet<T>& constraints, const TreeModel<T>& model,
                                     double tol) {
  if constexpr (Arith<T>::exact) {
    return verify_model(constraints, model);
  } else {
    return verify_model(constraints, model, tol);
  }
}

template <Scalar T>
ConstraintSet<T> o3_constraints(const TreeSixConfig<T>& cfg) {
  return o3_constraints_for(cfg.tree, cfg.points);
}

template <Scalar T>
ConstraintSet<T> o3_constraints(const ProductSixConfig<T>& cfg) {
  Matrix<T> squared(6, std::vector<T>(6, T(0)));
  for (const auto& factor : cfg.factors) {
    const auto d = factor.pairwise();
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) squared[i][j] += d[i][j] * d[i][j];
    }
  }
  return constraints_from_squared(octahedron_graph(), squared);
}

template <Scalar T>
MoveResult<T> move_reduction(const MetricTree<T>& tree, const Points<T>& points,
                             const TreePoint<T>& center) {
  for (std::size_t d = 0; d < 3; ++d) {
    if (!tree.on_geodesic(center, tree.geodesic(points[d], points[d + 3]))) {
      throw Error(ErrorKind::NotTripod, "center is not on every diagonal");
    }
  }
  MoveResult<T> result{points, {}};
  auto& pts = result.points;
  constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kLegPairs = {
      std::pair<std::size_t, std::size_t>{0, 4}, {1, 5}, {2, 3}};
  for (auto [p, q] : kLegPairs) {
    const TreePoint<T> branch = tree.median(center, pts[p], pts[q]);
    if (tree.same_point(branch, pts[p]) || tree.same_point(branch, pts[q])) continue;
    const T dp = tree.distance(center, pts[p]);
    const T dq = tree.distance(center, pts[q]);
    const std::size_t near = dp <= dq ? p : q;
    const std::size_t far = near == p ? q : p;
    const T radius = near == p ? dp : dq;
    MoveStep<T> step;
    step.role = near;
    step.from = pts[near];
    step.to = tree.point_at(tree.geodesic(center, pts[far]), radius);
    step.before = pairwise(tree, pts);
    pts[near] = step.to;
    step.after = pairwise(tree, pts);
    if (!monotone_step(step.before, step.after)) {
      throw Error(ErrorKind::MoveNotMonotone,
                  std::string("moving ") + kRoleNames[near] + " would lengthen a distance");
    }
    result.moves.push_back(std::move(step));
  }
  return result;
}

template <Scalar T>
TreeModel<T> build_tripod_model(const MetricTree<T>& tree, const Points<T>& pts,
                                const TreePoint<T>& center, AbcSelection* selection) {
  // [o p] inside [o q] exactly when p is the branch point of the pair.
  auto pick = [&](std::size_t p, std::size_t q) {
    const TreePoint<T> branch = tree.median(center, pts[p], pts[q]);
    if (tree.same_point(branch, pts[p])) return p;
    if (tree.same_point(branch, pts[q])) return q;
    throw Error(ErrorKind::ContainmentRuleUnsatisfied,
                std::string("neither of [o") + kRoleNames[p] + "], [o" + kRoleNames[q] +
                    "] contains the other");
  };
  const AbcSelection sel{pick(0, 4), pick(1, 5), pick(2, 3)};
  if (selection) *selection = sel;

  const std::array<std::size_t, 3> corner = {sel.a, sel.b, sel.c};
  std::array<std::array<T, 3>, 3> side;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) side[i][j] = tree.distance(pts[corner[i]], pts[corner[j]]);
  }

  // Longest side on the x-axis, third corner above it.
  std::size_t bi = 0;
  std::size_t bj = 1;
  for (auto [i, j] : {std::pair<std::size_t, std::size_t>{1, 2}, {0, 2}}) {
    if (side[i][j] > side[bi][bj]) {
      bi = i;
      bj = j;
    }
  }
  const std::size_t bk = 3 - bi - bj;
  std::array<PlanePoint<T>, 3> tri{};
  T height_squared = 0;
  const T base = side[bi][bj];
  if (!Arith<T>::is_zero(base)) {
    tri[bj] = {base, T(0)};
    T foot = (base * base + side[bi][bk] * side[bi][bk] - side[bj][bk] * side[bj][bk]) / (2 * base);
    height_squared = side[bi][bk] * side[bi][bk] - foot * foot;
    if (height_squared < 0) height_squared = 0;
    tri[bk] = {foot, T(1)};
  }
  const PlanePoint<T>& A = tri[0];
  const PlanePoint<T>& B = tri[1];
  const PlanePoint<T>& C = tri[2];
  const T& ab = side[0][1];
  const T& bc = side[1][2];
  const T& ac = side[0][2];
  auto dist = [&](std::size_t role, std::size_t corner_role) {
    return tree.distance(pts[role], pts[corner_role]);
  };

  std::array<PlanePoint<T>, 6> model;
  model[0] = along(A, C, ac, dist(0, sel.a));  // x  beyond a, away from c
  model[3] = along(C, A, ac, dist(3, sel.c));  // x' beyond c, away from a
  model[4] = along(A, B, ab, dist(4, sel.a));  // y' beyond a, away from b
  model[1] = along(B, A, ab, dist(1, sel.b));  // y  beyond b, away from a
  model[2] = along(C, B, bc, dist(2, sel.c));  // z  beyond c, away from b
  model[5] = along(B, C, bc, dist(5, sel.b));  // z' beyond b, away from c
  return emit_planar(model, height_squared);
}

template <Scalar T>
std::array<T, 6> collinear_coordinates(const MetricTree<T>& tree, const Points<T>& pts) {
  auto d = [&](std::size_t i, std::size_t j) { return tree.distance(pts[i], pts[j]); };
  std::array<T, 6> out;
  out[0] = 0;
  out[3] = d(3, 0);
  out[4] = d(4, 0);
  out[1] = d(4, 0) - d(4, 1);
  out[5] = d(5, 0);
  out[2] = d(5, 0) - d(5, 2);
  return out;
}

template <Scalar T>
CollinearBuild<T> build_collinear_model(const MetricTree<T>& tree, const Points<T>& points,
                                        std::size_t host, double tol) {
  if (host > 2) throw Error(ErrorKind::ParameterOutOfRange, "host diagonal index must be 0, 1 or 2");
  Perm to_host = {0, 1, 2, 3, 4, 5};
  std::swap(to_host[0], to_host[host]);
  std::swap(to_host[3], to_host[host + 3]);
  const ConstraintSet<T> target = o3_constraints_for(tree, points);
  for (unsigned flips = 0; flips < 4; ++flips) {
    Perm orient = {0, 1, 2, 3, 4, 5};
    if (flips & 1U) std::swap(orient[1], orient[4]);
    if (flips & 2U) std::swap(orient[2], orient[5]);
    const Perm total = compose(to_host, orient);
    const auto coords = collinear_coordinates(tree, relabel(points, total));
    TreeModel<T> model = unpermute_model(emit_line(coords), total);
    if (verify_tree_model(target, model, tol).passed) {
      return CollinearBuild<T>{std::move(model), (flips & 1U) != 0, (flips & 2U) != 0};
    }
  }
  throw Error(ErrorKind::VerificationFailedAllOrientations,
              "no orientation of the collinear layout verifies");
}

template <Scalar T>
TreeBuild<T> build_tree_model(const TreeSixConfig<T>& cfg, const BuildOptions& options) {
  for (const auto& p : cfg.points) cfg.tree.check(p);
  TreeBuild<T> out{{}, {}};
  BuildTrace<T>& trace = out.trace;
  const ConstraintSet<T> original = o3_constraints(cfg);

  // Coincident points share a model point after construction.
  std::array<bool, 6> grouped{};
  for (std::size_t i = 0; i < 6; ++i) {
    if (grouped[i]) continue;
    std::vector<std::size_t> cls = {i};
    for (std::size_t j = i + 1; j < 6; ++j) {
      if (!grouped[j] && cfg.tree.same_point(cfg.points[i], cfg.points[j])) {
        cls.push_back(j);
        grouped[j] = true;
      }
    }
    if (cls.size() > 1) trace.coincident.push_back(std::move(cls));
  }

  ShrinkResult<T> shrunk = shrink_to_connected(cfg);
  for (const auto& step : shrunk.steps) {
    if (!monotone_step(step.before, step.after)) {
      throw Error(ErrorKind::InternalExhaustion, "shrink step broke the reduction invariants");
    }
  }
  trace.shrinks = shrunk.steps;
  const MetricTree<T>& tree = shrunk.cfg.tree;

  auto accept = [&](const TreeModel<T>& model) -> std::optional<TreeModel<T>> {
    TreeModel<T> restored = restore_coincident(model, trace.coincident);
    VerificationReport report = verify_tree_model(original, restored, options.tol);
    if (report.passed) {
      trace.verification = std::move(report);
      return restored;
    }
    report = verify_tree_model(original, model, options.tol);
    if (report.passed) {
      trace.verification = std::move(report);
      return model;
    }
    return std::nullopt;
  };

  auto try_tripod = [&](const Perm& perm, const Points<T>& relabeled,
                        const TreePoint<T>& center) -> bool {
    MoveResult<T> moved = move_reduction(tree, relabeled, center);
    AbcSelection sel;
    TreeModel<T> model = build_tripod_model(tree, moved.points, center, &sel);
    auto accepted = accept(unpermute_model(model, perm));
    if (!accepted) return false;
    out.model = std::move(*accepted);
    trace.case_taken = "tripod";
    trace.abc = AbcSelection{perm[sel.a], perm[sel.b], perm[sel.c]};
    for (auto& step : moved.moves) {
      trace.moves.push_back(MoveStep<T>{perm[step.role], step.from, step.to,
                                        unpermute(step.before, perm), unpermute(step.after, perm)});
    }
    return true;
  };

  for (const Perm& perm : o3_automorphisms()) {
    ++trace.attempts;
    trace.automorphism = perm;
    const Points<T> relabeled = relabel(shrunk.cfg.points, perm);
    try {
      const CaseAnalysis<T> analysis = classify_configuration(TreeSixConfig<T>{tree, relabeled});
      if (std::holds_alternative<Tripod>(analysis.shape)) {
        if (try_tripod(perm, relabeled, *analysis.center)) return out;
        continue;
      }
      if (std::get<WithinDiagonal>(analysis.shape).host != 0) continue;
      try {
        CollinearBuild<T> line = build_collinear_model(tree, relabeled, 0, options.tol);
        if (auto accepted = accept(unpermute_model(line.model, perm))) {
          out.model = std::move(*accepted);
          trace.case_taken = "collinear";
          trace.host = perm[0] % 3;
          trace.flip_y = line.flip_y;
          trace.flip_z = line.flip_z;
          return out;
        }
      } catch (const Error&) {
        // Misclassified; fall back to tripods centered on the common part.
      }
      if (!analysis.intersections[0] || !analysis.intersections[1] || !analysis.intersections[2]) {
        continue;
      }
      const Segment<T>& first = *analysis.intersections[0];
      auto common = tree.intersect(tree.geodesic(first.u, first.v), analysis.diagonals[2]);
      if (!common) continue;
      for (const auto& center : {common->u, common->v}) {
        try {
          if (try_tripod(perm, relabeled, center)) return out;
        } catch (const Error&) {
        }
      }
    } catch (const Error&) {
      // This labeling does not fit the construction; try the next one.
    }
  }
  throw Error(ErrorKind::InternalExhaustion, "no octahedron automorphism produced a verified model");
}

template <Scalar T>
ProductBuild<T> build_product_model(const ProductSixConfig<T>& cfg, const BuildOptions& options) {
  if (cfg.factors.empty()) throw Error(ErrorKind::BadSize, "a product needs at least one factor");
  ProductBuild<T> out{{role_labels(), std::vector<std::vector<ModelCoord<T>>>(6)}, {}, {}};
  for (const auto& factor : cfg.factors) {
    TreeBuild<T> build = build_tree_model(factor, options);
    for (std::size_t r = 0; r < 6; ++r) {
      auto& block = build.model.points[r];
      out.model.points[r].insert(out.model.points[r].end(), block.begin(), block.end());
    }
    out.traces.push_back(std::move(build.trace));
  }
  out.verification = verify_tree_model(o3_constraints(cfg), out.model, options.tol);
  if (!out.verification.passed) {
    throw Error(ErrorKind::InternalExhaustion, "concatenated product model failed verification");
  }
  return out;
}

ProductSixConfig<double> to_float(const ProductSixConfig<Rational>& cfg) {
  ProductSixConfig<double> out;
  for (const auto& f : cfg.factors) out.factors.push_back(to_float(f));
  return out;
}

#define OCTACOMP_INSTANTIATE(T)                                                                 \
  template VerificationReport verify_tree_model<T>(const ConstraintSet<T>&, const TreeModel<T>&, \
                                                   double);                                     \
  template ConstraintSet<T> o3_constraints<T>(const TreeSixConfig<T>&);                         \
  template ConstraintSet<T> o3_constraints<T>(const ProductSixConfig<T>&);                      \
  template MoveResult<T> move_reduction<T>(const MetricTree<T>&, const Points<T>&,              \
                                           const TreePoint<T>&);                                \
  template TreeModel<T> build_tripod_model<T>(const MetricTree<T>&, const Points<T>&,           \
                                              const TreePoint<T>&, AbcSelection*);              \
  template std::array<T, 6> collinear_coordinates<T>(const MetricTree<T>&, const Points<T>&);   \
  template CollinearBuild<T> build_collinear_model<T>(const MetricTree<T>&, const Points<T>&,   \
                                                      std::size_t, double);                     \
  template TreeBuild<T> build_tree_model<T>(const TreeSixConfig<T>&, const BuildOptions&);      \
  template ProductBuild<T> build_product_model<T>(const ProductSixConfig<T>&, const BuildOptions&);

OCTACOMP_INSTANTIATE(double)
OCTACOMP_INSTANTIATE(Rational)

#undef OCTACOMP_INSTANTIATE

}  // namespace octacomp
