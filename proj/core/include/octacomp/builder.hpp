#pragma once

#include "octacomp/graphcmp.hpp"
#include "octacomp/tree.hpp"

#include <array>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace octacomp {

/// Exact trees produce models in a quadratic field; float trees produce
/// double coordinates.
template <Scalar T>
using ModelCoord = std::conditional_t<Arith<T>::exact, QuadraticSurd, double>;

template <Scalar T>
using TreeModel = ModelConfiguration<ModelCoord<T>>;

template <Scalar T>
struct ProductSixConfig {
  std::vector<TreeSixConfig<T>> factors;
};

template <Scalar T>
using PairwiseDistances = std::array<std::array<T, 6>, 6>;

template <Scalar T>
struct MoveStep {
  std::size_t role = 0;
  TreePoint<T> from;
  TreePoint<T> to;
  PairwiseDistances<T> before;
  PairwiseDistances<T> after;
};

template <Scalar T>
struct MoveResult {
  std::array<TreePoint<T>, 6> points;
  std::vector<MoveStep<T>> moves;
};

/// Nests each leg pair (x,y'), (y,z'), (z,x') around the tripod center by
/// sliding the point nearer to the center onto the other point's geodesic.
/// Throws NotTripod when the center is off a diagonal and MoveNotMonotone if
/// a move would lengthen a non-diagonal distance or change a diagonal.
template <Scalar T>
MoveResult<T> move_reduction(const MetricTree<T>& tree, const std::array<TreePoint<T>, 6>& points,
                             const TreePoint<T>& center);

/// Roles chosen as the model triangle's corners.
struct AbcSelection {
  std::size_t a = 0;  // x or y'
  std::size_t b = 0;  // y or z'
  std::size_t c = 0;  // z or x'
};

/// Planar model from a triangle on a, b, c with every diagonal laid out along
/// a triangle side. Throws ContainmentRuleUnsatisfied for un-nested pairs.
template <Scalar T>
TreeModel<T> build_tripod_model(const MetricTree<T>& tree, const std::array<TreePoint<T>, 6>& points,
                                const TreePoint<T>& center, AbcSelection* selection = nullptr);

/// Coordinates on a line with x at 0 and [xx'] as the host diagonal.
template <Scalar T>
std::array<T, 6> collinear_coordinates(const MetricTree<T>& tree,
                                       const std::array<TreePoint<T>, 6>& points);

template <Scalar T>
struct CollinearBuild {
  TreeModel<T> model;
  bool flip_y = false;
  bool flip_z = false;
};

/// Relabels `host` to [xx'] and tries the four orientations of [yy'] and
/// [zz'] until the model verifies. Throws VerificationFailedAllOrientations.
template <Scalar T>
CollinearBuild<T> build_collinear_model(const MetricTree<T>& tree,
                                        const std::array<TreePoint<T>, 6>& points, std::size_t host,
                                        double tol = kDefaultTol);

struct BuildOptions {
  double tol = kDefaultTol;  // float mode only; exact mode verifies with zero tolerance
};

template <Scalar T>
struct BuildTrace {
  std::vector<std::vector<std::size_t>> coincident;  // classes of roles sharing a point
  std::vector<ShrinkStep<T>> shrinks;
  std::vector<MoveStep<T>> moves;  // roles and distances in the input labeling
  std::string case_taken;          // "tripod" or "collinear"
  std::array<std::size_t, 6> automorphism{};
  std::optional<AbcSelection> abc;  // input roles
  std::optional<std::size_t> host;  // input diagonal index
  bool flip_y = false;
  bool flip_z = false;
  std::size_t attempts = 0;
  VerificationReport verification;
};

template <Scalar T>
struct TreeBuild {
  TreeModel<T> model;
  BuildTrace<T> trace;
};

/// Octahedron constraints for six tree points (bounds are tree distances).
template <Scalar T>
ConstraintSet<T> o3_constraints(const TreeSixConfig<T>& cfg);

/// Octahedron constraints in the l2 product of the factors.
template <Scalar T>
ConstraintSet<T> o3_constraints(const ProductSixConfig<T>& cfg);

template <Scalar T>
VerificationReport verify_tree_model(const ConstraintSet<T>& constraints, const TreeModel<T>& model,
                                     double tol = kDefaultTol);

/// Verified model for six points in a tree: shrink, then search the
/// octahedron automorphisms for a labeling whose case construction verifies
/// against the input distances. Throws InternalExhaustion if none does.
template <Scalar T>
TreeBuild<T> build_tree_model(const TreeSixConfig<T>& cfg, const BuildOptions& options = {});

template <Scalar T>
struct ProductBuild {
  TreeModel<T> model;
  std::vector<BuildTrace<T>> traces;
  VerificationReport verification;
};

/// One model per factor, concatenated block by block.
template <Scalar T>
ProductBuild<T> build_product_model(const ProductSixConfig<T>& cfg,
                                    const BuildOptions& options = {});

ProductSixConfig<double> to_float(const ProductSixConfig<Rational>& cfg);

}  // namespace octacomp
