#include "octacomp/graphcmp.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace octacomp;

TEST_CASE("octahedron: 12 edges, degree 4, partners are the only non-edges") {
  const auto g = octahedron_graph();
  CHECK(g.size() == 6);
  CHECK(g.edge_count() == 12);
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(g.degree(i) == 4);
    for (std::size_t j = 0; j < 6; ++j) {
      if (i != j) CHECK(g.adjacent(i, j) == (j != partner(i)));
    }
  }
  CHECK(g.labels()[3] == "x'");
}

TEST_CASE("cycles need three vertices") {
  CHECK(cycle_graph(4).edge_count() == 4);
  CHECK(cycle_graph(4).adjacent(0, 3));
  CHECK_FALSE(cycle_graph(4).adjacent(0, 2));
  CHECK_THROWS_AS(cycle_graph(2), Error);
}

TEST_CASE("the 48 automorphisms match a brute-force count over all 720 permutations") {
  const auto g = octahedron_graph();
  std::array<std::size_t, 6> perm = {0, 1, 2, 3, 4, 5};
  std::set<std::array<std::size_t, 6>> brute;
  do {
    bool keeps = true;
    for (std::size_t i = 0; i < 6 && keeps; ++i) {
      for (std::size_t j = 0; j < 6 && keeps; ++j) {
        if (i != j && g.adjacent(i, j) != g.adjacent(perm[i], perm[j])) keeps = false;
      }
    }
    if (keeps) brute.insert(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  const auto autos = o3_automorphisms();
  CHECK(autos.size() == 48);
  CHECK(autos.front() == std::array<std::size_t, 6>{0, 1, 2, 3, 4, 5});
  CHECK(std::set<std::array<std::size_t, 6>>(autos.begin(), autos.end()) == brute);
}

TEST_CASE("constraints: upper bounds on edges, lower bounds on non-edges") {
  oracle::Rng rng(1);
  const auto space = validate_metric<double>(oracle::distance_matrix(oracle::random_points(rng, 6, 3)));
  const auto cs = constraints(octahedron_graph(), space);
  CHECK(cs.items.size() == 15);
  std::size_t lower = 0;
  for (const auto& c : cs.items) {
    const bool diagonal = c.j == partner(c.i);
    CHECK((c.sense == Sense::Lower) == diagonal);
    CHECK(c.bound == doctest::Approx(space(c.i, c.j)).epsilon(1e-15));
    CHECK(c.bound_squared == doctest::Approx(c.bound * c.bound).epsilon(1e-12));
    lower += diagonal;
  }
  CHECK(lower == 3);

  const std::vector<std::string> twice = {"0", "0", "1", "2", "3", "4"};
  CHECK_THROWS_AS(constraints(octahedron_graph(), space, twice), Error);
  const std::vector<std::string> unknown = {"0", "1", "2", "3", "4", "nine"};
  CHECK_THROWS_AS(constraints(octahedron_graph(), space, unknown), Error);
}

TEST_CASE("regular octahedron passes with zero slack on the edges") {
  Matrix<double> ones(6, std::vector<double>(6, 1.0));
  for (std::size_t i = 0; i < 6; ++i) ones[i][i] = 0.0;
  const auto cs = constraints(octahedron_graph(), validate_metric(ones));
  const double h = std::sqrt(0.5);
  ModelConfiguration<double> m{cs.labels, {{h, 0, 0}, {0, h, 0}, {0, 0, h}, {-h, 0, 0}, {0, -h, 0}, {0, 0, -h}}};
  const auto rep = verify_model(cs, m);
  CHECK(rep.passed);
  CHECK(rep.min_slack == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(rep.entries.size() == 15);

  ModelConfiguration<double> short_model{cs.labels, {{0}, {0}, {0}, {0}, {0}}};
  CHECK_THROWS_AS(verify_model(cs, short_model), Error);
}

TEST_CASE("tolerance semantics: a <= b holds within tol iff a <= b + tol") {
  const auto cs = constraints(cycle_graph(4), validate_metric<double>({{0, 1, 2, 1}, {1, 0, 1, 2}, {2, 1, 0, 1}, {1, 2, 1, 0}}));
  // Unit square scaled so the sides exceed 1 by 5e-10.
  const double s = 1.0 + 5e-10;
  ModelConfiguration<double> m{cs.labels, {{0, 0}, {s, 0}, {s, s}, {0, s}}};
  const auto loose = verify_model(cs, m, 1e-9);
  const auto tight = verify_model(cs, m, 1e-10);
  CHECK_FALSE(loose.passed);  // diagonals sqrt(2) s < 2 by far
  CHECK_FALSE(tight.passed);
  std::size_t side_violations_loose = 0;
  std::size_t side_violations_tight = 0;
  for (const auto& v : loose.violations) side_violations_loose += v.sense == Sense::Upper;
  for (const auto& v : tight.violations) side_violations_tight += v.sense == Sense::Upper;
  CHECK(side_violations_loose == 0);
  CHECK(side_violations_tight == 4);
}

TEST_CASE("property: slacks are invariant under rigid motions") {
  oracle::Rng rng(9);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = oracle::random_points(rng, 6, 3);
    const auto space = validate_metric<double>(oracle::distance_matrix(oracle::random_points(rng, 6, 3)));
    const auto cs = constraints(octahedron_graph(), space);
    const auto base = verify_model(cs, ModelConfiguration<double>{cs.labels, pts});

    // Random rotation from Gram-Schmidt, plus a translation.
    std::array<std::array<double, 3>, 3> q{};
    for (int c = 0; c < 3; ++c) {
      for (int r = 0; r < 3; ++r) q[c][r] = gauss(rng);
      for (int p = 0; p < c; ++p) {
        double dot = 0;
        for (int r = 0; r < 3; ++r) dot += q[c][r] * q[p][r];
        for (int r = 0; r < 3; ++r) q[c][r] -= dot * q[p][r];
      }
      double norm = 0;
      for (int r = 0; r < 3; ++r) norm += q[c][r] * q[c][r];
      for (int r = 0; r < 3; ++r) q[c][r] /= std::sqrt(norm);
    }
    std::vector<std::vector<double>> moved(6, std::vector<double>(3, 0.0));
    for (std::size_t i = 0; i < 6; ++i) {
      for (int c = 0; c < 3; ++c) {
        for (int r = 0; r < 3; ++r) moved[i][c] += q[c][r] * pts[i][r];
        moved[i][c] += 10.0 * c - 3.0;
      }
    }
    const auto rep = verify_model(cs, ModelConfiguration<double>{cs.labels, moved});
    REQUIRE(rep.entries.size() == base.entries.size());
    for (std::size_t k = 0; k < rep.entries.size(); ++k) {
      CHECK(std::abs(rep.entries[k].slack - base.entries[k].slack) < 1e-12);
    }
  }
}

TEST_CASE("exact verification is unchanged by rational translations") {
  using R = Rational;
  Matrix<R> d(6, std::vector<R>(6, R(3)));
  for (std::size_t i = 0; i < 6; ++i) d[i][i] = 0;
  const auto cs = constraints(octahedron_graph(), validate_metric(d));
  const QuadraticSurd s3 = exact_sqrt(R(9, 2));
  // A flattened octahedron with the y and z diagonals collapsed.
  std::vector<std::vector<QuadraticSurd>> pts = {{s3, R(0)}, {R(0), s3}, {R(0), -s3}, {-s3, R(0)}, {R(0), -s3}, {R(0), s3}};
  const auto base = verify_model(cs, ModelConfiguration<QuadraticSurd>{cs.labels, pts});
  for (auto& p : pts) {
    p[0] = p[0] + QuadraticSurd(R(7, 3));
    p[1] = p[1] + QuadraticSurd(R(-5));
  }
  const auto moved = verify_model(cs, ModelConfiguration<QuadraticSurd>{cs.labels, pts});
  CHECK(base.exact);
  CHECK(moved.passed == base.passed);
  CHECK(moved.min_slack == base.min_slack);
  CHECK(moved.violations.size() == base.violations.size());
}
