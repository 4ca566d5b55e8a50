#include "octacomp/metric.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace octacomp;

namespace {

ErrorKind first_violation(Matrix<double> d) {
  try {
    validate_metric(std::move(d));
  } catch (const MetricValidationError& e) {
    return e.violations().front().kind;
  }
  FAIL("expected a validation error");
  return ErrorKind::BadSpec;
}

}  // namespace

TEST_CASE("validate_metric accepts metrics and names the first defect") {
  CHECK_NOTHROW(validate_metric<double>({{0, 1, 2}, {1, 0, 1}, {2, 1, 0}}));
  CHECK(first_violation({{0, -1}, {-1, 0}}) == ErrorKind::NegativeEntry);
  CHECK(first_violation({{1, 1}, {1, 0}}) == ErrorKind::NonzeroDiagonal);
  CHECK(first_violation({{0, 1}, {2, 0}}) == ErrorKind::AsymmetricMatrix);
  CHECK(first_violation({{0, 0}, {0, 0}}) == ErrorKind::ZeroDistanceDistinctPoints);
  CHECK(first_violation({{0, 1, 3}, {1, 0, 1}, {3, 1, 0}}) == ErrorKind::TriangleViolation);
  CHECK_THROWS_AS(validate_metric<double>({{0, 1}, {1}}), Error);
}

TEST_CASE("triangle checks honor the tolerance") {
  const double over = 2.0 + 5e-10;
  CHECK_NOTHROW(validate_metric<double>({{0, 1, over}, {1, 0, 1}, {over, 1, 0}}));
  CHECK_THROWS_AS(validate_metric<double>({{0, 1, over}, {1, 0, 1}, {over, 1, 0}}, 1e-10), MetricValidationError);
}

TEST_CASE("labels default to row numbers and resolve by name") {
  const auto s = validate_metric<double>({{0, 1}, {1, 0}});
  CHECK(s.label(1) == "1");
  const auto t = validate_metric<double>({"p", "q"}, {{0, 1}, {1, 0}});
  CHECK(t.index_of("q") == 1);
  CHECK_THROWS_AS(t.index_of("r"), Error);
}

TEST_CASE("restrict keeps the chosen rows in the given order") {
  const auto s = validate_metric<double>({"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1.5}, {2, 1.5, 0}});
  const auto r = restrict(s, {"c", "a"});
  CHECK(r.size() == 2);
  CHECK(r.label(0) == "c");
  CHECK(r(0, 1) == 2);
}

TEST_CASE("star tree E1 distances are additive, the unit square is not") {
  // Roles x, y, z, x', y', z' on a star with legs of length 3.
  Matrix<Rational> d(6, std::vector<Rational>(6));
  const std::array<int, 6> leg = {0, 1, 2, 2, 0, 1};
  const std::array<int, 6> off = {1, 1, 1, 2, 2, 2};
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) {
      if (i != j) d[i][j] = leg[i] == leg[j] ? Rational(std::abs(off[i] - off[j])) : Rational(off[i] + off[j]);
    }
  }
  CHECK(is_additive(validate_metric(d)).additive);

  const double r2 = std::sqrt(2.0);
  const auto square = validate_metric<double>({{0, 1, r2, 1}, {1, 0, 1, r2}, {r2, 1, 0, 1}, {1, r2, 1, 0}});
  const AdditivityResult res = is_additive(square, 1e-9);
  CHECK_FALSE(res.additive);
  REQUIRE(res.witness);
}

TEST_CASE("property: point sets in random trees are additive at zero tolerance") {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto cfg = oracle::random_tree_config(rng);
    const auto d = oracle::tree_pairwise(cfg);
    // Drop repeated points so the space stays a metric.
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < 6; ++i) {
      bool fresh = true;
      for (auto k : keep) fresh = fresh && d[i][k] != 0;
      if (fresh) keep.push_back(i);
    }
    Matrix<Rational> m(keep.size(), std::vector<Rational>(keep.size()));
    for (std::size_t a = 0; a < keep.size(); ++a) {
      for (std::size_t b = 0; b < keep.size(); ++b) m[a][b] = d[keep[a]][keep[b]];
    }
    CHECK(is_additive(validate_metric(m)).additive);
  }
}

TEST_CASE("six-point configurations need six points") {
  CHECK_THROWS_AS(SixPointConfiguration<double>::in_order(validate_metric<double>({{0, 1}, {1, 0}})), Error);
}
