#include "octacomp/feasibility.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace octacomp {

namespace {

double max_abs(const Matrix<double>& m) {
  double out = 0.0;
  for (const auto& row : m) {
    for (double v : row) out = std::max(out, std::abs(v));
  }
  return out;
}

void require_symmetric(const Matrix<double>& m) {
  const std::size_t n = m.size();
  const double scale = std::max(1.0, max_abs(m));
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw Error(ErrorKind::NotSquare, "matrix is not square");
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(m[i][j] - m[j][i]) > 1e-12 * scale) {
        throw Error(ErrorKind::NotSymmetric, "matrix is not symmetric");
      }
    }
  }
}

Matrix<double> identity(std::size_t n) {
  Matrix<double> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) out[i][i] = 1.0;
  return out;
}

struct Scaled {
  std::vector<std::size_t> i, j;
  std::vector<double> bound;  // squared, unit maximum distance
  std::vector<bool> upper;
};

double squared_gap(const Matrix<double>& g, std::size_t i, std::size_t j) {
  return g[i][i] + g[j][j] - 2.0 * g[i][j];
}

// Largest excess over the squared bounds.
double squared_violation(const Matrix<double>& g, const Scaled& c) {
  double worst = 0.0;
  for (std::size_t k = 0; k < c.bound.size(); ++k) {
    const double s = squared_gap(g, c.i[k], c.j[k]);
    worst = std::max(worst, c.upper[k] ? s - c.bound[k] : c.bound[k] - s);
  }
  return worst;
}

// Starting point for local refinement: every positive eigen-direction up to
// n - 1, with a small fixed jitter in the unused ones so they can open up.
std::vector<std::vector<double>> polish_start(const Matrix<double>& gram) {
  const std::size_t n = gram.size();
  const std::size_t d = std::max<std::size_t>(n, 1);
  const SymmetricEigen eig = symmetric_eigen(gram);
  std::vector<std::vector<double>> pts(n, std::vector<double>(d, 0.0));
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (std::size_t k = 0; k < d; ++k) {
    const double lambda = k < n ? eig.values[k] : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      const double jitter = 1e-3 * (static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5);
      pts[i][k] = lambda > 1e-6 ? eig.vectors[i][k] * std::sqrt(lambda) : jitter;
    }
  }
  return pts;
}

// Points whose position the bounds pin down. A zero-length chain of upper
// bounds merges two points; a chain whose length equals a lower bound puts
// each intermediate point on the segment at a fixed ratio. Eliminating them
// removes the tangencies that stall local refinement on tree metrics.
// Returns an orthonormal basis of the admissible point combinations.
Eigen::MatrixXd forced_basis(const Scaled& c, std::size_t n) {
  constexpr double kSlack = 1e-12;
  const double inf = std::numeric_limits<double>::infinity();
  Matrix<double> sp(n, std::vector<double>(n, inf));
  for (std::size_t i = 0; i < n; ++i) sp[i][i] = 0.0;
  for (std::size_t k = 0; k < c.bound.size(); ++k) {
    if (!c.upper[k]) continue;
    const double b = std::sqrt(std::max(0.0, c.bound[k]));
    sp[c.i[k]][c.j[k]] = sp[c.j[k]][c.i[k]] = std::min(sp[c.i[k]][c.j[k]], b);
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) sp[i][j] = std::min(sp[i][j], sp[i][m] + sp[m][j]);
    }
  }
  std::vector<Eigen::VectorXd> rows;
  auto relation = [&](std::size_t p, std::size_t a, std::size_t b, double t) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    r[static_cast<Eigen::Index>(p)] += 1.0;
    r[static_cast<Eigen::Index>(a)] -= 1.0 - t;
    r[static_cast<Eigen::Index>(b)] -= t;
    rows.push_back(std::move(r));
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sp[i][j] <= kSlack) relation(j, i, i, 0.0);
    }
  }
  for (std::size_t k = 0; k < c.bound.size(); ++k) {
    if (c.upper[k] || c.bound[k] <= 0.0) continue;
    const std::size_t i = c.i[k];
    const std::size_t j = c.j[k];
    const double lower = std::sqrt(c.bound[k]);
    for (std::size_t p = 0; p < n; ++p) {
      if (p == i || p == j) continue;
      const double through = sp[i][p] + sp[p][j];
      if (through <= lower + kSlack) relation(p, i, j, sp[i][p] / through);
    }
  }
  if (rows.empty()) return Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::MatrixXd r(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < rows.size(); ++k) r.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > 1e-9 * sv[0]) ++rank;
  return svd.matrixV().rightCols(static_cast<Eigen::Index>(n) - rank);
}

// Levenberg-Marquardt on hinge residuals of distances, aiming a hair inside
// every bound, over configurations basis * Y. Returns the final hinge cost.
double polish(std::vector<std::vector<double>>& pts, const Scaled& c, const Eigen::MatrixXd& basis) {
  const std::size_t n = pts.size();
  const auto d = static_cast<Eigen::Index>(pts.front().size());
  const auto m = static_cast<Eigen::Index>(c.bound.size());
  const Eigen::Index q = basis.cols();
  constexpr double kMargin = 1e-12;
  Eigen::MatrixXd start(static_cast<Eigen::Index>(n), d);
  for (std::size_t p = 0; p < n; ++p) {
    for (Eigen::Index a = 0; a < d; ++a) start(static_cast<Eigen::Index>(p), a) = pts[p][static_cast<std::size_t>(a)];
  }
  const Eigen::MatrixXd y0 = basis.transpose() * start;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(y0.data(), q * d);
  std::vector<double> target(c.bound.size());
  for (std::size_t k = 0; k < c.bound.size(); ++k) {
    const double b = std::sqrt(std::max(0.0, c.bound[k]));
    target[k] = c.upper[k] ? b * (1.0 - kMargin) : b * (1.0 + kMargin);
  }
  // Column-major Y: coordinate a of basis vector t sits at t + a * q.
  auto evaluate = [&](const Eigen::VectorXd& v, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    const Eigen::MatrixXd pos = basis * Eigen::Map<const Eigen::MatrixXd>(v.data(), q, d);
    r.setZero(m);
    if (jac) jac->setZero(m, v.size());
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto i = static_cast<Eigen::Index>(c.i[static_cast<std::size_t>(k)]);
      const auto j = static_cast<Eigen::Index>(c.j[static_cast<std::size_t>(k)]);
      const bool upper = c.upper[static_cast<std::size_t>(k)];
      const Eigen::RowVectorXd diff = pos.row(i) - pos.row(j);
      const double dist = diff.norm();
      const double sign = upper ? 1.0 : -1.0;
      const double excess = sign * (dist - target[static_cast<std::size_t>(k)]);
      if (excess <= 0.0) continue;
      r[k] = excess;
      if (jac && dist > 0.0) {
        const Eigen::RowVectorXd unit = sign * diff / dist;
        const Eigen::RowVectorXd w = basis.row(i) - basis.row(j);
        for (Eigen::Index a = 0; a < d; ++a) jac->row(k).segment(a * q, q) = unit[a] * w;
      }
    }
    return r.squaredNorm();
  };

  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  double cost = evaluate(x, r, &jac);
  double lambda = -1.0;
  for (int iter = 0; iter < 2000 && cost > 0.0; ++iter) {
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;
    if (lambda < 0.0) lambda = 1e-3 * std::max(1e-12, jtj.diagonal().maxCoeff());
    bool improved = false;
    for (int tries = 0; tries < 30 && !improved; ++tries) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal().array() += lambda;
      const Eigen::VectorXd trial = x - lhs.ldlt().solve(grad);
      Eigen::VectorXd r_trial;
      if (evaluate(trial, r_trial, nullptr) < cost) {
        x = trial;
        lambda = std::max(lambda / 3.0, 1e-15);
        improved = true;
      } else {
        lambda *= 4.0;
      }
    }
    if (!improved) break;
    cost = evaluate(x, r, &jac);
  }
  const Eigen::MatrixXd pos = basis * Eigen::Map<const Eigen::MatrixXd>(x.data(), q, d);
  for (std::size_t p = 0; p < n; ++p) {
    for (Eigen::Index a = 0; a < d; ++a) pts[p][static_cast<std::size_t>(a)] = pos(static_cast<Eigen::Index>(p), a);
  }
  return cost;
}

bool is_checkpoint(std::size_t it) {
  static constexpr std::array<std::size_t, 5> kEarly = {10, 30, 100, 300, 1000};
  return std::find(kEarly.begin(), kEarly.end(), it) != kEarly.end() || (it > 0 && it % 2000 == 0);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "Feasible";
    case Verdict::Infeasible: return "Infeasible";
    case Verdict::Undecided: return "Undecided";
  }
  return "Undecided";
}

SymmetricEigen symmetric_eigen(const Matrix<double>& m) {
  require_symmetric(m);
  const std::size_t n = m.size();
  Matrix<double> a = m;
  Matrix<double> v = identity(n);
  double frob = 0.0;
  for (const auto& row : a) {
    for (double x : row) frob += x * x;
  }
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    }
    if (off <= 1e-32 * frob || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = a[q][p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k][p];
          const double vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });
  SymmetricEigen out{std::vector<double>(n), Matrix<double>(n, std::vector<double>(n))};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a[order[k]][order[k]];
    for (std::size_t r = 0; r < n; ++r) out.vectors[r][k] = v[r][order[k]];
  }
  return out;
}

Matrix<double> psd_project(const Matrix<double>& m) {
  const SymmetricEigen eig = symmetric_eigen(m);
  const std::size_t n = m.size();
  Matrix<double> out(n, std::vector<double>(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (lambda <= 0.0) break;
    for (std::size_t i = 0; i < n; ++i) {
      const double vi = lambda * eig.vectors[i][k];
      for (std::size_t j = 0; j <= i; ++j) out[i][j] += vi * eig.vectors[j][k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) out[j][i] = out[i][j];
  }
  return out;
}

Matrix<double> centered_gram(const Matrix<double>& squared) {
  const std::size_t n = squared.size();
  std::vector<double> row_mean(n, 0.0);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += squared[i][j];
    row_mean[i] /= static_cast<double>(n);
    mean += row_mean[i];
  }
  mean /= static_cast<double>(std::max<std::size_t>(n, 1));
  Matrix<double> g(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) g[i][j] = -0.5 * (squared[i][j] - row_mean[i] - row_mean[j] + mean);
  }
  return g;
}

std::vector<std::vector<double>> gram_coordinates(const Matrix<double>& gram, double cutoff) {
  const std::size_t n = gram.size();
  const SymmetricEigen eig = symmetric_eigen(gram);
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += gram[i][i];
  std::size_t keep = 0;
  while (keep < n && eig.values[keep] > cutoff * std::abs(trace) && eig.values[keep] > 0.0) ++keep;
  std::vector<std::vector<double>> pts(n, std::vector<double>(std::max<std::size_t>(keep, 1), 0.0));
  for (std::size_t k = 0; k < keep; ++k) {
    const double root = std::sqrt(eig.values[k]);
    for (std::size_t i = 0; i < n; ++i) pts[i][k] = eig.vectors[i][k] * root;
  }
  return pts;
}

FeasibilityReport check_constraints(const ConstraintSet<double>& cs, const FeasibilityOptions& opts) {
  const std::size_t n = cs.labels.size();
  FeasibilityReport report;
  double scale = 0.0;
  for (const auto& c : cs.items) {
    if (c.i >= n || c.j >= n) throw Error(ErrorKind::DimensionMismatch, "constraint index out of range");
    scale = std::max(scale, std::sqrt(std::max(0.0, c.bound_squared)));
  }

  auto certify = [&](std::vector<std::vector<double>> pts, double unit) -> bool {
    for (auto& p : pts) {
      for (double& v : p) v *= unit;
    }
    ModelConfiguration<double> model{cs.labels, std::move(pts)};
    VerificationReport check = verify_model(cs, model, opts.tol);
    if (!check.passed) return false;
    report.verdict = Verdict::Feasible;
    report.max_violation = std::max(0.0, -check.min_slack);
    report.model = std::move(model);
    report.verification = std::move(check);
    return true;
  };

  if (n == 0 || scale == 0.0) {
    // Every bound is zero: all points at one spot is the only candidate.
    if (certify(std::vector<std::vector<double>>(n, std::vector<double>(1, 0.0)), 1.0)) return report;
    report.verdict = Verdict::Infeasible;
    return report;
  }

  Scaled c;
  Matrix<double> squared(n, std::vector<double>(n, 0.0));
  for (const auto& item : cs.items) {
    const double b = item.bound_squared / (scale * scale);
    c.i.push_back(item.i);
    c.j.push_back(item.j);
    c.bound.push_back(b);
    c.upper.push_back(item.sense == Sense::Upper);
    squared[item.i][item.j] = squared[item.j][item.i] = b;
  }

  // Refinement restarts from the new iterate and also resumes the best
  // earlier refinement, which matters on nearly degenerate instances.
  // Refinement first works inside the subspace of forced positions, then in
  // the full space in case a near-tie was taken for a forced position.
  const Eigen::MatrixXd reduced = forced_basis(c, n);
  const Eigen::MatrixXd full = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const bool has_forced = reduced.cols() < full.cols();
  std::vector<std::vector<double>> best;
  double best_cost = std::numeric_limits<double>::infinity();
  auto attempt = [&](const Matrix<double>& gram) {
    if (certify(gram_coordinates(gram, opts.rank_cutoff), scale)) return true;
    auto pts = polish_start(gram);
    if (has_forced) {
      auto pinned = pts;
      polish(pinned, c, reduced);
      if (certify(pinned, scale)) return true;
    }
    const double cost = polish(pts, c, full);
    if (certify(pts, scale)) return true;
    if (!best.empty()) {
      const double resumed = polish(best, c, full);
      if (certify(best, scale)) return true;
      best_cost = resumed;
    }
    if (cost < best_cost) {
      best = std::move(pts);
      best_cost = cost;
    }
    return false;
  };

  Matrix<double> x = psd_project(centered_gram(squared));
  if (attempt(x)) return report;

  const std::size_t m = c.bound.size();
  std::vector<double> correction(m, 0.0);
  Matrix<double> cone_correction(n, std::vector<double>(n, 0.0));
  std::deque<double> history;
  std::size_t next_try = 1;
  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    // Half-space sweep; each correction is a multiple of the constraint matrix.
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = c.i[k];
      const std::size_t j = c.j[k];
      const double value = squared_gap(x, i, j) + 4.0 * correction[k];
      const double lambda = c.upper[k] ? std::max(0.0, (value - c.bound[k]) / 4.0)
                                       : std::min(0.0, (value - c.bound[k]) / 4.0);
      const double shift = correction[k] - lambda;
      x[i][i] += shift;
      x[j][j] += shift;
      x[i][j] -= shift;
      x[j][i] -= shift;
      correction[k] = lambda;
    }
    Matrix<double> y = x;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) y[a][b] += cone_correction[a][b];
    }
    Matrix<double> projected = psd_project(y);
    double gap = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        cone_correction[a][b] = y[a][b] - projected[a][b];
        const double diff = x[a][b] - projected[a][b];
        gap += diff * diff;
      }
    }
    x = std::move(projected);
    report.iterations = it;
    report.residual = std::sqrt(gap);

    const bool converged = squared_violation(x, c) <= opts.tol && it >= next_try;
    if (converged || is_checkpoint(it)) {
      if (attempt(x)) return report;
      if (converged) next_try = it * 2;
    }

    history.push_back(report.residual);
    if (history.size() > opts.window + 1) history.pop_front();
    if (history.size() == opts.window + 1 && report.residual >= opts.infeas_threshold &&
        std::abs(report.residual - history.front()) <= 1e-3 * report.residual) {
      // A stalled gap on a feasible instance still yields to refinement.
      if (attempt(x)) return report;
      report.verdict = Verdict::Infeasible;
      break;
    }
  }

  // No certificate: report how far the best PSD iterate is from the bounds.
  auto pts = gram_coordinates(x, opts.rank_cutoff);
  double worst = 0.0;
  for (const auto& item : cs.items) {
    double s = 0.0;
    for (std::size_t a = 0; a < pts[item.i].size(); ++a) {
      const double d = pts[item.i][a] - pts[item.j][a];
      s += d * d;
    }
    const double dist = std::sqrt(s) * scale;
    worst = std::max(worst, item.sense == Sense::Upper ? dist - item.bound : item.bound - dist);
  }
  report.max_violation = std::max(0.0, worst);
  report.residual *= scale * scale;
  return report;
}

FeasibilityReport check_comparison(const ComparisonGraph& graph, const FiniteMetricSpace<double>& space,
                                   const std::vector<std::string>& labeling,
                                   const FeasibilityOptions& opts) {
  return check_constraints(constraints(graph, space, labeling), opts);
}

FeasibilityReport check_comparison(const ComparisonGraph& graph, const FiniteMetricSpace<double>& space,
                                   const FeasibilityOptions& opts) {
  return check_constraints(constraints(graph, space), opts);
}

C4Summary check_all_c4_sublabelings(const FiniteMetricSpace<double>& space, const FeasibilityOptions& opts) {
  if (space.size() != 6) throw Error(ErrorKind::WrongPointCount, "expected a six-point space");
  const ComparisonGraph c4 = cycle_graph(4);
  C4Summary summary;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = a + 1; b < 6; ++b) {
      for (std::size_t cc = b + 1; cc < 6; ++cc) {
        for (std::size_t d = cc + 1; d < 6; ++d) {
          const std::array<std::array<std::size_t, 4>, 3> cycles = {
              std::array<std::size_t, 4>{a, b, cc, d}, {a, cc, b, d}, {a, b, d, cc}};
          for (const auto& cyc : cycles) {
            C4Check check;
            std::vector<std::string> labeling;
            for (std::size_t k = 0; k < 4; ++k) {
              check.cycle[k] = space.label(cyc[k]);
              labeling.push_back(check.cycle[k]);
            }
            check.report = check_comparison(c4, restrict(space, labeling), labeling, opts);
            switch (check.report.verdict) {
              case Verdict::Feasible: ++summary.feasible; break;
              case Verdict::Infeasible: ++summary.infeasible; break;
              case Verdict::Undecided: ++summary.undecided; break;
            }
            summary.checks.push_back(std::move(check));
          }
        }
      }
    }
  }
  return summary;
}

std::vector<std::array<std::size_t, 6>> perfect_matchings_of_six() {
  std::vector<std::array<std::size_t, 6>> out;
  // Pair 0 with b, then the smallest remaining with d, the last two together.
  for (std::size_t b = 1; b < 6; ++b) {
    std::vector<std::size_t> rest;
    for (std::size_t k = 1; k < 6; ++k) {
      if (k != b) rest.push_back(k);
    }
    for (std::size_t t = 1; t < 4; ++t) {
      std::vector<std::size_t> last;
      for (std::size_t k = 1; k < 4; ++k) {
        if (k != t) last.push_back(rest[k]);
      }
      out.push_back({0, rest[0], last[0], b, rest[t], last[1]});
    }
  }
  return out;
}

}  // namespace octacomp
