#include "octacomp/graphcmp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace octacomp {

ComparisonGraph::ComparisonGraph(std::vector<std::string> labels,
                                 std::vector<std::vector<bool>> adjacency)
    : labels_(std::move(labels)), adjacency_(std::move(adjacency)) {
  const std::size_t n = labels_.size();
  if (adjacency_.size() != n) throw Error(ErrorKind::BadSize, "adjacency size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency_[i].size() != n) throw Error(ErrorKind::BadSize, "adjacency is not square");
    if (adjacency_[i][i]) throw Error(ErrorKind::BadSize, "self-loop at " + labels_[i]);
    for (std::size_t j = 0; j < i; ++j) {
      if (adjacency_[i][j] != adjacency_[j][i]) {
        throw Error(ErrorKind::BadSize, "adjacency is not symmetric");
      }
    }
  }
}

ComparisonGraph::ComparisonGraph(std::vector<std::string> labels,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : ComparisonGraph(labels, [&] {
        std::vector<std::vector<bool>> adj(labels.size(), std::vector<bool>(labels.size(), false));
        for (auto [a, b] : edges) {
          if (a >= labels.size() || b >= labels.size()) {
            throw Error(ErrorKind::BadSize, "edge endpoint out of range");
          }
          adj[a][b] = adj[b][a] = true;
        }
        return adj;
      }()) {}

std::size_t ComparisonGraph::degree(std::size_t i) const {
  return static_cast<std::size_t>(std::count(adjacency_[i].begin(), adjacency_[i].end(), true));
}

std::size_t ComparisonGraph::edge_count() const {
  std::size_t total = 0;
  for (std::size_t i = 0; i < size(); ++i) total += degree(i);
  return total / 2;
}

std::size_t ComparisonGraph::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::UnknownLabel, "unknown graph vertex '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

ComparisonGraph ComparisonGraph::induced(const std::vector<std::size_t>& vertices) const {
  std::vector<std::string> labels;
  std::vector<std::vector<bool>> adj(vertices.size(), std::vector<bool>(vertices.size(), false));
  for (std::size_t a = 0; a < vertices.size(); ++a) {
    labels.push_back(labels_.at(vertices[a]));
    for (std::size_t b = 0; b < vertices.size(); ++b) {
      adj[a][b] = adjacency_[vertices[a]][vertices[b]];
    }
  }
  return ComparisonGraph(std::move(labels), std::move(adj));
}

ComparisonGraph octahedron_graph() {
  std::vector<std::string> labels(kRoleNames.begin(), kRoleNames.end());
  std::vector<std::vector<bool>> adj(6, std::vector<bool>(6, true));
  for (std::size_t i = 0; i < 6; ++i) {
    adj[i][i] = false;
    adj[i][partner(i)] = false;
  }
  return ComparisonGraph(std::move(labels), std::move(adj));
}

ComparisonGraph cycle_graph(std::size_t n) {
  if (n < 3) throw Error(ErrorKind::BadSize, "a cycle needs at least three vertices");
  std::vector<std::string> labels;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("v" + std::to_string(i));
    edges.emplace_back(i, (i + 1) % n);
  }
  return ComparisonGraph(std::move(labels), edges);
}

std::vector<std::array<std::size_t, 6>> o3_automorphisms() {
  // Permute the three diagonals, then optionally flip each one.
  std::vector<std::array<std::size_t, 6>> out;
  std::array<std::size_t, 3> order = {0, 1, 2};
  do {
    for (unsigned flips = 0; flips < 8; ++flips) {
      std::array<std::size_t, 6> perm{};
      for (std::size_t d = 0; d < 3; ++d) {
        const bool flip = (flips >> d) & 1U;
        perm[d] = flip ? order[d] + 3 : order[d];
        perm[d + 3] = flip ? order[d] : order[d] + 3;
      }
      out.push_back(perm);
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

template <Scalar T>
ConstraintSet<T> constraints_from_squared(const ComparisonGraph& graph, const Matrix<T>& squared) {
  const std::size_t n = graph.size();
  if (squared.size() != n) throw Error(ErrorKind::DimensionMismatch, "distance matrix size mismatch");
  ConstraintSet<T> out{graph.labels(), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Constraint<T> c;
      c.i = i;
      c.j = j;
      c.sense = graph.adjacent(i, j) ? Sense::Upper : Sense::Lower;
      c.bound_squared = squared[i][j];
      c.bound = std::sqrt(Arith<T>::to_double(squared[i][j]));
      out.items.push_back(std::move(c));
    }
  }
  return out;
}

template <Scalar T>
ConstraintSet<T> constraints(const ComparisonGraph& graph, const FiniteMetricSpace<T>& space,
                             const std::vector<std::string>& labeling) {
  const std::size_t n = graph.size();
  if (labeling.size() != n || space.size() != n) {
    throw Error(ErrorKind::LabelingNotBijective, "labeling must match graph and space sizes");
  }
  std::vector<std::size_t> rows;
  for (const auto& label : labeling) rows.push_back(space.index_of(label));
  if (std::set<std::size_t>(rows.begin(), rows.end()).size() != n) {
    throw Error(ErrorKind::LabelingNotBijective, "labeling assigns a point twice");
  }
  ConstraintSet<T> out{graph.labels(), {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const T& d = space(rows[i], rows[j]);
      Constraint<T> c;
      c.i = i;
      c.j = j;
      c.sense = graph.adjacent(i, j) ? Sense::Upper : Sense::Lower;
      c.bound_squared = d * d;
      c.bound = Arith<T>::to_double(d);
      out.items.push_back(std::move(c));
    }
  }
  return out;
}

template <Scalar T>
ConstraintSet<T> constraints(const ComparisonGraph& graph, const FiniteMetricSpace<T>& space) {
  if (space.size() != graph.size()) {
    throw Error(ErrorKind::LabelingNotBijective, "graph and space sizes differ");
  }
  return constraints(graph, space, space.labels());
}

namespace {

void check_shape(std::size_t labels, std::size_t points, const auto& model) {
  if (points != labels) throw Error(ErrorKind::DimensionMismatch, "model needs one point per label");
  const std::size_t d = model.dimension();
  for (const auto& p : model.points) {
    if (p.size() != d) throw Error(ErrorKind::DimensionMismatch, "model points differ in dimension");
  }
}

void finish(VerificationReport& report) {
  report.min_slack = std::numeric_limits<double>::infinity();
  for (const auto& e : report.entries) report.min_slack = std::min(report.min_slack, e.slack);
  if (report.entries.empty()) report.min_slack = 0.0;
}

}  // namespace

VerificationReport verify_model(const ConstraintSet<double>& constraints,
                                const ModelConfiguration<double>& model, double tol) {
  check_shape(constraints.labels.size(), model.points.size(), model);
  VerificationReport report;
  for (const auto& c : constraints.items) {
    double sq = 0.0;
    for (std::size_t k = 0; k < model.dimension(); ++k) {
      const double delta = model.points[c.i][k] - model.points[c.j][k];
      sq += delta * delta;
    }
    SlackEntry e{c.i, c.j, c.sense, c.bound, std::sqrt(sq), 0.0};
    e.slack = c.sense == Sense::Upper ? e.bound - e.distance : e.distance - e.bound;
    if (e.slack < -tol) {
      report.passed = false;
      report.violations.push_back(e);
    }
    report.entries.push_back(e);
  }
  finish(report);
  return report;
}

namespace {

// Sign of (rational + sum_k coef_k sqrt(k)). Exact with at most one radical;
// otherwise evaluated in 512-bit floating point and flagged inexact.
int sign_of(const Rational& rational, const std::map<Rational, Rational>& radicals, bool& exact) {
  std::vector<std::pair<Rational, Rational>> live;
  for (const auto& [k, coef] : radicals) {
    if (sgn(coef) != 0) live.emplace_back(k, coef);
  }
  if (live.empty()) return sgn(rational);
  if (live.size() == 1) return QuadraticSurd(rational, live[0].second, live[0].first).sign();
  exact = false;
  mpf_class total(rational, 512);
  for (const auto& [k, coef] : live) {
    mpf_class root(k, 512);
    root = sqrt(root);
    total += mpf_class(coef, 512) * root;
  }
  return sgn(total);
}

}  // namespace

VerificationReport verify_model(const ConstraintSet<Rational>& constraints,
                                const ModelConfiguration<QuadraticSurd>& model) {
  check_shape(constraints.labels.size(), model.points.size(), model);
  VerificationReport report;
  report.exact = true;
  for (const auto& c : constraints.items) {
    Rational rational_part = 0;
    std::map<Rational, Rational> radicals;
    for (std::size_t k = 0; k < model.dimension(); ++k) {
      const QuadraticSurd delta = model.points[c.i][k] - model.points[c.j][k];
      const QuadraticSurd sq = delta * delta;
      rational_part += sq.rational_part();
      if (!sq.is_rational()) radicals[sq.radicand()] += sq.surd_coefficient();
    }
    // Upper: bound^2 - dist^2 >= 0. Lower: dist^2 - bound^2 >= 0.
    bool exact = true;
    int sign;
    if (c.sense == Sense::Upper) {
      std::map<Rational, Rational> negated;
      for (const auto& [k, coef] : radicals) negated[k] = -coef;
      sign = sign_of(Rational(c.bound_squared - rational_part), negated, exact);
    } else {
      sign = sign_of(Rational(rational_part - c.bound_squared), radicals, exact);
    }
    report.exact = report.exact && exact;
    double sq_value = rational_part.get_d();
    for (const auto& [k, coef] : radicals) sq_value += coef.get_d() * std::sqrt(k.get_d());
    SlackEntry e{c.i, c.j, c.sense, c.bound, std::sqrt(std::max(0.0, sq_value)), 0.0};
    e.slack = c.sense == Sense::Upper ? e.bound - e.distance : e.distance - e.bound;
    if (sign < 0) {
      // Keep the rounded slack from masking an exact failure.
      if (e.slack >= 0) e.slack = std::nextafter(0.0, -1.0);
      report.passed = false;
      report.violations.push_back(e);
    } else if (e.slack < 0) {
      e.slack = 0.0;  // exact pass; rounding noise only
    }
    report.entries.push_back(e);
  }
  finish(report);
  return report;
}

ModelConfiguration<double> to_float(const ModelConfiguration<QuadraticSurd>& model) {
  ModelConfiguration<double> out{model.labels, {}};
  for (const auto& p : model.points) {
    std::vector<double> q;
    for (const auto& c : p) q.push_back(c.to_double());
    out.points.push_back(std::move(q));
  }
  return out;
}

ConstraintSet<double> to_float(const ConstraintSet<Rational>& constraints) {
  ConstraintSet<double> out{constraints.labels, {}};
  for (const auto& c : constraints.items) {
    out.items.push_back(Constraint<double>{c.i, c.j, c.sense, c.bound_squared.get_d(), c.bound});
  }
  return out;
}

#define OCTACOMP_INSTANTIATE(T)                                                          \
  template ConstraintSet<T> constraints<T>(const ComparisonGraph&, const FiniteMetricSpace<T>&, \
                                           const std::vector<std::string>&);             \
  template ConstraintSet<T> constraints<T>(const ComparisonGraph&, const FiniteMetricSpace<T>&); \
  template ConstraintSet<T> constraints_from_squared<T>(const ComparisonGraph&, const Matrix<T>&);

OCTACOMP_INSTANTIATE(double)
OCTACOMP_INSTANTIATE(Rational)

#undef OCTACOMP_INSTANTIATE

}  // namespace octacomp
