// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "cli.hpp"
#include "octacomp/builder.hpp"
#include "octacomp/feasibility.hpp"
#include "octacomp/harness.hpp"
#include "octacomp/io.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace octacomp;
using io::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string data(const std::string& name) { return std::string(OCTACOMP_DATA_DIR) + "/" + name; }

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

const std::vector<std::string> kRoles{"x", "y", "z", "x'", "y'", "z'"};

// The tree corpus shared by criteria 1 and 8.
std::vector<TreeSixConfig<Rational>> tree_corpus(std::size_t count) {
  const json spec = read_json(data("campaigns/theorem_trees.json"));
  std::vector<TreeSixConfig<Rational>> out;
  for (const auto& inst : generate(io::generator_from_json(spec.at("generator")), count)) {
    out.push_back(std::get<TreeSixConfig<Rational>>(inst.data));
  }
  return out;
}

Matrix<double> tree_matrix(const TreeSixConfig<Rational>& cfg) {
  const auto d = oracle::tree_pairwise(cfg);
  Matrix<double> m(6, std::vector<double>(6));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) m[i][j] = d[i][j].get_d();
  }
  return m;
}

Outcome trees() {
  const auto corpus = tree_corpus(1000);
  Outcome o;
  std::size_t passed = 0, collinear = 0, collinear_exact = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& cfg : corpus) {
    try {
      const auto b = build_tree_model(cfg);
      const auto& v = b.trace.verification;
      if (v.passed && v.exact && v.min_slack >= 0.0) ++passed;
      if (b.trace.case_taken == "collinear") {
        ++collinear;
        if (v.passed && v.exact && v.violations.empty()) ++collinear_exact;
      }
    } catch (const Error&) {
    }
  }
  const double exact_time = seconds_since(start);
  double min_slack = INFINITY;
  std::size_t float_passed = 0;
  for (const auto& cfg : corpus) {
    try {
      const auto b = build_tree_model(to_float(cfg));
      if (b.trace.verification.passed) ++float_passed;
      min_slack = std::min(min_slack, b.trace.verification.min_slack);
    } catch (const Error&) {
    }
  }
  const double total_time = seconds_since(start);
  o.pass = passed == 1000 && collinear == collinear_exact && float_passed == 1000 && min_slack >= -1e-9 &&
           total_time < 10.0;
  o.detail = "exact " + std::to_string(passed) + "/1000 (" + std::to_string(collinear) +
             " collinear, all at zero tolerance: " + (collinear == collinear_exact ? "yes" : "no") + "), float " +
             std::to_string(float_passed) + "/1000, float min slack " + fmt(min_slack) + ", " + fmt(exact_time) +
             " s exact, " + fmt(total_time) + " s total";
  return o;
}

Outcome products() {
  const json spec = read_json(data("campaigns/theorem_products.json"));
  const auto gen = io::generator_from_json(spec.at("generator"));
  std::size_t passed = 0;
  double min_slack = INFINITY;
  for (const auto& inst : generate(gen, 500)) {
    const auto& cfg = std::get<ProductSixConfig<Rational>>(inst.data);
    if (cfg.factors.size() < 2 || cfg.factors.size() > 4) continue;
    try {
      const auto b = build_product_model(to_float(cfg));
      if (b.verification.passed) ++passed;
      min_slack = std::min(min_slack, b.verification.min_slack);
    } catch (const Error&) {
    }
  }
  return {passed == 500 && min_slack >= -1e-9,
          std::to_string(passed) + "/500 verified, min slack " + fmt(min_slack)};
}

Outcome tripod_example() {
  const auto cfg = io::tree_config_from_json<Rational>(read_json(data("e1.json")));
  const auto b = build_tree_model(cfg);
  const auto model = to_float(b.model);
  // Documented coordinates in role order x, y, z, x', y', z'.
  const double r3 = std::sqrt(3.0);
  const std::vector<std::vector<double>> documented{{0, 0}, {2, 0}, {1, r3}, {1.5, 1.5 * r3}, {-1, 0}, {2.5, -r3 / 2}};
  const auto want = oracle::distance_matrix(documented);
  const auto got = oracle::model_distances(model);
  double worst = 0.0;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) worst = std::max(worst, std::abs(got[i][j] - want[i][j]));
  }
  const bool named = std::abs(got[0][5] - std::sqrt(7.0)) <= 1e-12 && std::abs(got[3][4] - std::sqrt(13.0)) <= 1e-12 &&
                     std::abs(got[0][3] - 3) <= 1e-12 && std::abs(got[1][4] - 3) <= 1e-12 &&
                     std::abs(got[2][5] - 3) <= 1e-12;
  return {worst <= 1e-12 && named && b.trace.verification.passed,
          "max distance error " + fmt(worst) + ", |x-z'| " + fmt(got[0][5]) + ", |x'-y'| " + fmt(got[3][4])};
}

Outcome path_example() {
  const auto cfg = io::tree_config_from_json<Rational>(read_json(data("path.json")));
  const auto coords = collinear_coordinates(cfg.tree, cfg.points);
  const std::array<Rational, 6> want{0, 2, 4, 10, 8, 6};  // x, y, z, x', y', z'
  const auto b = build_tree_model(cfg);
  bool model_exact = b.model.dimension() == 1;
  for (std::size_t r = 0; r < 6 && model_exact; ++r) {
    model_exact = b.model.points[r][0] == QuadraticSurd(want[r]);
  }
  std::string shown;
  for (const auto& c : coords) shown += (shown.empty() ? "" : ",") + to_string(c);
  return {coords == want && model_exact, "coordinates (" + shown + "), built model exact: " + (model_exact ? "yes" : "no")};
}

Outcome oracle_agreement() {
  const auto graph = octahedron_graph();
  std::size_t certified = 0, coincident = 0;
  for (const auto& cfg : tree_corpus(200)) {
    const auto source = tree_matrix(cfg);
    bool distinct = true;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) distinct = distinct && source[i][j] > 0.0;
    }
    // Coincident points make a pseudometric, which a metric space rejects;
    // those go to the solver as the same constraint set without the space.
    FeasibilityReport r;
    if (distinct) {
      r = check_comparison(graph, validate_metric(kRoles, source));
    } else {
      ++coincident;
      Matrix<double> squared = source;
      for (auto& row : squared) {
        for (double& v : row) v *= v;
      }
      r = check_constraints(constraints_from_squared(graph, squared));
    }
    if (r.verdict != Verdict::Feasible || !r.model || !r.verification || !r.verification->passed) continue;
    if (oracle::octahedron_slack(*r.model, source) >= -kDefaultTol) ++certified;
  }
  return {certified == 200, std::to_string(certified) + "/200 Feasible with an independently checked witness (" +
                                std::to_string(coincident) + " with coincident points)"};
}

Outcome planted() {
  const auto c4 = cycle_graph(4);
  const auto bad = check_comparison(c4, io::metric_from_json<double>(read_json(data("c4_infeasible.json"))));
  const auto square = check_comparison(c4, io::metric_from_json<double>(read_json(data("unit_square.json"))));
  const bool ok = bad.verdict == Verdict::Infeasible && square.verdict == Verdict::Feasible && square.max_violation <= 1e-9;
  return {ok, "C4 " + to_string(bad.verdict) + ", square " + to_string(square.verdict) + " with max violation " +
                  fmt(square.max_violation)};
}

Outcome euclidean_control() {
  const json spec = read_json(data("campaigns/question_euclidean.json"));
  const auto gen = io::generator_from_json(spec.at("generator"));
  const auto graph = octahedron_graph();
  const auto matchings = perfect_matchings_of_six();
  std::size_t feasible = 0, runs = 0;
  double min_slack = INFINITY;
  for (const auto& inst : generate(gen, 1000)) {
    const auto& space = std::get<FiniteMetricSpace<double>>(inst.data);
    for (const auto& m : matchings) {
      ++runs;
      std::vector<std::string> labeling;
      std::vector<std::vector<double>> source(6, std::vector<double>(6));
      for (std::size_t r = 0; r < 6; ++r) {
        labeling.push_back(space.label(m[r]));
        for (std::size_t s = 0; s < 6; ++s) source[r][s] = space(m[r], m[s]);
      }
      const auto rep = check_comparison(graph, space, labeling);
      if (rep.verdict != Verdict::Feasible || !rep.model || !rep.verification->passed) continue;
      const double slack = oracle::octahedron_slack(*rep.model, source);
      min_slack = std::min(min_slack, slack);
      if (slack >= -1e-9) ++feasible;
    }
  }
  return {feasible == runs && runs == 15000,
          std::to_string(feasible) + "/" + std::to_string(runs) + " labelings Feasible, witness min slack " + fmt(min_slack)};
}

template <class Step>
bool step_monotone(const Step& s, std::size_t& violations) {
  bool ok = true;
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i + 1; j < 6; ++j) {
      const bool diagonal = j == i + 3;
      if (diagonal ? s.after[i][j] != s.before[i][j] : s.after[i][j] > s.before[i][j]) {
        ++violations;
        ok = false;
      }
    }
  }
  return ok;
}

Outcome reductions() {
  std::size_t shrinks = 0, moves = 0, violations = 0, chain_breaks = 0;
  for (const auto& cfg : tree_corpus(1000)) {
    const auto b = build_tree_model(cfg);
    // Each step must start where the previous one ended, beginning at the input distances.
    auto current = oracle::tree_pairwise(cfg);
    for (const auto& s : b.trace.shrinks) {
      ++shrinks;
      if (s.before != current) ++chain_breaks;
      step_monotone(s, violations);
      current = s.after;
    }
    for (const auto& s : b.trace.moves) {
      ++moves;
      if (s.before != current) ++chain_breaks;
      step_monotone(s, violations);
      current = s.after;
    }
  }
  return {violations == 0 && chain_breaks == 0,
          std::to_string(shrinks) + " shrinks, " + std::to_string(moves) + " moves, " + std::to_string(violations) +
              " violations, " + std::to_string(chain_breaks) + " chain breaks"};
}

double inf_norm(const Matrix<double>& m) {
  double best = 0.0;
  for (const auto& row : m) {
    double s = 0.0;
    for (double v : row) s += std::abs(v);
    best = std::max(best, s);
  }
  return best;
}

Outcome eigensolver() {
  oracle::Rng rng(2718);
  double worst_recon = 0.0, worst_ortho = 0.0, worst_idem = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_symmetric(rng, 6, trial % 2 == 0 ? 1.0 : 100.0);
    const auto e = symmetric_eigen(m);
    Matrix<double> recon(6, std::vector<double>(6, 0.0)), gram(6, std::vector<double>(6, 0.0));
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        for (std::size_t k = 0; k < 6; ++k) {
          recon[i][j] += e.vectors[i][k] * e.values[k] * e.vectors[j][k];
          gram[i][j] += e.vectors[k][i] * e.vectors[k][j];
        }
        recon[i][j] -= m[i][j];
        gram[i][j] -= i == j ? 1.0 : 0.0;
      }
    }
    worst_recon = std::max(worst_recon, inf_norm(recon) / inf_norm(m));
    for (const auto& row : gram) {
      for (double v : row) worst_ortho = std::max(worst_ortho, std::abs(v));
    }
    const auto p = psd_project(m);
    const auto pp = psd_project(p);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) worst_idem = std::max(worst_idem, std::abs(pp[i][j] - p[i][j]));
    }
  }
  return {worst_recon <= 1e-10 && worst_ortho <= 1e-10 && worst_idem <= 1e-10,
          "relative reconstruction " + fmt(worst_recon) + ", orthonormality " + fmt(worst_ortho) + ", idempotence " +
              fmt(worst_idem)};
}

struct CliRun {
  int code;
  std::string text;
};

CliRun cli(const std::vector<std::string>& args, const std::string& stdin_text = "") {
  std::istringstream in(stdin_text);
  std::ostringstream out;
  const int code = cli::run(args, in, out);
  return {code, out.str()};
}

Outcome hyperbolic_campaign() {
  const std::string spec = data("campaigns/question_hyperbolic.json");
  const auto one = cli({"--threads", "1", "campaign", spec});
  const auto two = cli({"--threads", "2", "campaign", spec});
  const json doc = json::parse(one.text);
  const json& report = doc.at("report");
  const std::size_t trials = report.at("trials");
  const std::size_t undecided = report.at("undecided");
  const std::size_t findings = report.at("findings").size();
  const bool deterministic = one.text == two.text && one.code == two.code;
  const bool exit_ok = one.code == (findings > 0 ? cli::kExitFindings : cli::kExitOk);
  const bool slack_listed = report.at("min_slack").is_number();
  std::size_t replayed = 0;
  for (const auto& f : report.at("findings")) {
    const auto again = cli({"campaign"}, f.at("replay").dump());
    const json r = json::parse(again.text).at("report");
    if (again.code == cli::kExitFindings && r.at("findings").size() == 1 &&
        r.at("findings")[0].at("reason") == f.at("reason")) {
      ++replayed;
    }
  }
  const bool ok = trials == 10000 && deterministic && exit_ok && slack_listed && undecided * 100 <= trials &&
                  replayed == findings;
  return {ok, std::to_string(trials) + " trials, deterministic across worker counts: " + (deterministic ? "yes" : "no") +
                  ", undecided " + std::to_string(undecided) + ", findings " + std::to_string(findings) +
                  " (replayed " + std::to_string(replayed) + "), exit " + std::to_string(one.code) + ", min slack " +
                  (slack_listed ? fmt(report.at("min_slack").get<double>()) : std::string("missing"))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"tree theorem soundness", trees},
      {"product theorem soundness", products},
      {"worked tripod instance", tripod_example},
      {"collinear exactness", path_example},
      {"solver agrees with builder on trees", oracle_agreement},
      {"planted infeasibility and square control", planted},
      {"Euclidean identity control", euclidean_control},
      {"reduction invariants", reductions},
      {"eigensolver accuracy", eigensolver},
      {"hyperbolic question campaign", hyperbolic_campaign},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k + 1 << " (" << criteria[k].first << "): " << o.detail
              << " [" << fmt(seconds_since(start)) << " s]" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
