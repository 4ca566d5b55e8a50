#include "octacomp/harness.hpp"

#include "octacomp/io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

namespace octacomp {

namespace {

using Rng = std::mt19937_64;

[[noreturn]] void bad_spec(const std::string& what) { throw Error(ErrorKind::BadSpec, what); }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void check_spec(const RandomTreeSpec& s) {
  if (s.max_vertices < 1) bad_spec("max_vertices must be at least 1");
  if (s.denominator < 1 || s.point_steps < 1) bad_spec("denominator and point_steps must be positive");
  if (sgn(s.min_length) <= 0 || s.min_length > s.max_length) bad_spec("need 0 < min_length <= max_length");
  if (!(s.reuse_probability >= 0.0 && s.reuse_probability <= 1.0)) bad_spec("reuse_probability must lie in [0, 1]");
  mpz_class lo = s.min_length.get_num() * s.denominator;
  mpz_class hi = s.max_length.get_num() * s.denominator;
  mpz_cdiv_q(lo.get_mpz_t(), lo.get_mpz_t(), s.min_length.get_den_mpz_t());
  mpz_fdiv_q(hi.get_mpz_t(), hi.get_mpz_t(), s.max_length.get_den_mpz_t());
  if (lo > hi) bad_spec("no length k/denominator lies in [min_length, max_length]");
}

TreeSixConfig<Rational> random_tree(const RandomTreeSpec& s, Rng& rng) {
  check_spec(s);
  mpz_class lo = s.min_length.get_num() * s.denominator;
  mpz_class hi = s.max_length.get_num() * s.denominator;
  mpz_cdiv_q(lo.get_mpz_t(), lo.get_mpz_t(), s.min_length.get_den_mpz_t());
  mpz_fdiv_q(hi.get_mpz_t(), hi.get_mpz_t(), s.max_length.get_den_mpz_t());
  const std::size_t n = s.max_vertices < 2 ? 1 : uniform_index(rng, 2, s.max_vertices);
  std::vector<std::string> names;
  for (std::size_t v = 0; v < n; ++v) names.push_back("v" + std::to_string(v));
  std::vector<TreeEdge<Rational>> edges;
  for (std::size_t v = 1; v < n; ++v) {
    const auto k = uniform_index(rng, lo.get_ui(), hi.get_ui());
    edges.push_back({uniform_index(rng, 0, v - 1), v, Rational(mpz_class(k), mpz_class(s.denominator))});
    edges.back().length.canonicalize();
  }
  MetricTree<Rational> tree(names, edges);
  std::array<TreePoint<Rational>, 6> points;
  for (std::size_t r = 0; r < 6; ++r) {
    if (r > 0 && uniform01(rng) < s.reuse_probability) {
      points[r] = points[uniform_index(rng, 0, r - 1)];
    } else if (edges.empty()) {
      points[r] = tree.vertex_point(0);
    } else {
      const std::size_t e = uniform_index(rng, 0, edges.size() - 1);
      const std::size_t j = uniform_index(rng, 0, s.point_steps);
      Rational offset = edges[e].length * Rational(mpz_class(j), mpz_class(s.point_steps));
      offset.canonicalize();
      points[r] = tree.edge_point(e, offset);
    }
  }
  return TreeSixConfig<Rational>{std::move(tree), points};
}

std::vector<std::string> role_labels() { return {kRoleNames.begin(), kRoleNames.end()}; }

std::optional<FiniteMetricSpace<double>> as_metric(const Matrix<double>& d) {
  try {
    return validate_metric(role_labels(), d);
  } catch (const Error&) {
    return std::nullopt;
  }
}

FiniteMetricSpace<double> euclidean(const EuclideanSampleSpec& s, Rng& rng,
                                    std::vector<std::vector<double>>& coords) {
  if (s.dim < 1 || !(s.scale > 0.0)) bad_spec("Euclidean samples need dim >= 1 and scale > 0");
  for (int attempt = 0; attempt < 100; ++attempt) {
    coords.assign(6, std::vector<double>(s.dim));
    for (auto& p : coords) {
      for (double& c : p) c = s.scale * uniform01(rng);
    }
    Matrix<double> d(6, std::vector<double>(6, 0.0));
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        double sum = 0.0;
        for (std::size_t k = 0; k < s.dim; ++k) sum += (coords[i][k] - coords[j][k]) * (coords[i][k] - coords[j][k]);
        d[i][j] = std::sqrt(sum);
      }
    }
    if (auto m = as_metric(d)) return *m;
  }
  bad_spec("could not draw six distinct Euclidean points");
}

FiniteMetricSpace<double> hyperbolic(const HyperbolicSampleSpec& s, Rng& rng) {
  if (!(s.max_radius > 0.0) || s.max_radius > 30.0) bad_spec("max_radius must lie in (0, 30]");
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::array<double, 6> radius{};
    std::array<double, 6> angle{};
    for (std::size_t i = 0; i < 6; ++i) {
      radius[i] = std::acosh(1.0 + uniform01(rng) * (std::cosh(s.max_radius) - 1.0));
      angle[i] = 2.0 * std::numbers::pi * uniform01(rng);
    }
    Matrix<double> d(6, std::vector<double>(6, 0.0));
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        if (i != j) d[i][j] = hyperbolic_distance(radius[i], angle[i], radius[j], angle[j]);
      }
    }
    if (auto m = as_metric(d)) return *m;
  }
  bad_spec("could not draw six distinct hyperbolic points");
}

Matrix<double> tree_distances(const TreeSixConfig<Rational>& cfg) {
  const auto pair = cfg.pairwise();
  Matrix<double> d(6, std::vector<double>(6));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 6; ++j) d[i][j] = pair[i][j].get_d();
  }
  return d;
}

FiniteMetricSpace<double> perturbed(const PerturbedMetricSpec& s, Rng& rng) {
  if (!(s.epsilon >= 0.0 && s.epsilon < 1.0)) bad_spec("epsilon must lie in [0, 1)");
  Matrix<double> base;
  for (int attempt = 0; attempt < 100 && base.empty(); ++attempt) {
    if (auto* t = std::get_if<RandomTreeSpec>(&s.base)) {
      auto d = tree_distances(random_tree(*t, rng));
      if (as_metric(d)) base = std::move(d);
    } else if (auto* e = std::get_if<EuclideanSampleSpec>(&s.base)) {
      std::vector<std::vector<double>> coords;
      base = euclidean(*e, rng, coords).matrix();
    } else {
      base = hyperbolic(std::get<HyperbolicSampleSpec>(s.base), rng).matrix();
    }
  }
  if (base.empty()) bad_spec("base generator never produced six distinct points");
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Matrix<double> d = base;
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = i + 1; j < 6; ++j) {
        d[i][j] *= 1.0 + s.epsilon * (2.0 * uniform01(rng) - 1.0);
        d[j][i] = d[i][j];
      }
    }
    if (auto m = as_metric(d)) return *m;
  }
  bad_spec("perturbations never satisfied the triangle inequality");
}

// Outcome of one trial before the ordered merge.
struct Trial {
  enum class Status { Pass, Fail, Undecided } status = Status::Pass;
  bool filtered = false;
  std::size_t checks = 0;
  std::optional<double> min_slack;
  std::string reason;
  std::optional<Instance> instance;  // kept for findings only
};

void note_slack(Trial& t, double slack) { t.min_slack = t.min_slack ? std::min(*t.min_slack, slack) : slack; }

CampaignReport run_trials(const std::string& name, const GeneratorSpec& spec, std::size_t count,
                          const CampaignOptions& options, const std::function<Trial(const Instance&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Trial> trials(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      const std::size_t i = options.first_index + k;
      try {
        Instance inst = generate_one(spec, i);
        trials[k] = body(inst);
        if (trials[k].status == Trial::Status::Fail) trials[k].instance = std::move(inst);
      } catch (const Error& e) {
        trials[k] = Trial{};
        trials[k].status = Trial::Status::Fail;
        trials[k].reason = std::string(to_string(e.kind())) + ": " + e.what();
        if (e.kind() != ErrorKind::BadSpec) trials[k].instance = generate_one(spec, i);
      }
    }
  };
  // Reject bad specs up front rather than inside a worker.
  if (count > 0) generate_one(spec, options.first_index);
  const std::size_t workers = worker_count(options.threads, count);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  CampaignReport report;
  report.campaign = name;
  report.trials = count;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = options.first_index + k;
    Trial& t = trials[k];
    report.checks += t.checks;
    if (t.filtered) ++report.filtered;
    if (t.min_slack) {
      report.min_slack = report.has_slack ? std::min(report.min_slack, *t.min_slack) : *t.min_slack;
      report.has_slack = true;
    }
    switch (t.status) {
      case Trial::Status::Pass: ++report.passes; break;
      case Trial::Status::Undecided: ++report.undecided; break;
      case Trial::Status::Fail: {
        ++report.failures;
        nlohmann::json replay{{"schema", io::kSchema},
                              {"campaign", name},
                              {"generator", io::generator_json(spec)},
                              {"index", i},
                              {"reason", t.reason}};
        replay["instance"] = t.instance ? io::instance_json(*t.instance) : nlohmann::json(nullptr);
        if (options.replay_dir) {
          std::filesystem::create_directories(*options.replay_dir);
          std::ofstream out(*options.replay_dir / (name + "-" + std::to_string(i) + ".json"));
          out << replay.dump(2) << '\n';
        }
        report.findings.push_back(Finding{i, t.reason, std::move(replay)});
        break;
      }
    }
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

template <Scalar T>
void theorem_tree(Trial& t, const TreeSixConfig<T>& cfg, const CampaignOptions& options) {
  TreeBuild<T> build = build_tree_model(cfg, BuildOptions{options.tol});
  ++t.checks;
  note_slack(t, build.trace.verification.min_slack);
  if (!build.trace.verification.passed) {
    t.status = Trial::Status::Fail;
    t.reason = "model failed verification";
  }
}

template <Scalar T>
void theorem_product(Trial& t, const ProductSixConfig<T>& cfg, const CampaignOptions& options) {
  ProductBuild<T> build = build_product_model(cfg, BuildOptions{options.tol});
  ++t.checks;
  note_slack(t, build.verification.min_slack);
  if (!build.verification.passed) {
    t.status = Trial::Status::Fail;
    t.reason = "product model failed verification";
  }
}

void cross_check(Trial& t, const ConstraintSet<Rational>& cs, const CampaignOptions& options) {
  const FeasibilityReport rep = check_constraints(to_float(cs), options.feasibility);
  ++t.checks;
  if (rep.verdict == Verdict::Infeasible) {
    t.status = Trial::Status::Fail;
    t.reason = "feasibility oracle reports Infeasible for a tree instance";
  } else if (rep.verdict == Verdict::Undecided && t.status == Trial::Status::Pass) {
    t.status = Trial::Status::Undecided;
  }
}

const FiniteMetricSpace<double>& metric_of(const Instance& inst) {
  if (const auto* m = std::get_if<FiniteMetricSpace<double>>(&inst.data)) return *m;
  bad_spec("this campaign needs a metric generator (Euclidean, hyperbolic or perturbed)");
}

std::vector<std::string> matching_labeling(const FiniteMetricSpace<double>& space,
                                           const std::array<std::size_t, 6>& order) {
  std::vector<std::string> labeling;
  for (auto k : order) labeling.push_back(space.label(k));
  return labeling;
}

std::string matching_name(const std::vector<std::string>& labeling) {
  return "{" + labeling[0] + labeling[3] + ", " + labeling[1] + labeling[4] + ", " + labeling[2] + labeling[5] + "}";
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t seed, std::size_t index) {
  return splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(index));
}

double hyperbolic_distance(double r1, double theta1, double r2, double theta2) {
  // sinh^2(d/2) = sinh^2((r1 - r2)/2) + sinh r1 sinh r2 sin^2(dtheta/2), a
  // cancellation-free form of the hyperbolic law of cosines.
  const double a = std::sinh((r1 - r2) / 2.0);
  const double b = std::sin((theta1 - theta2) / 2.0);
  return 2.0 * std::asinh(std::sqrt(a * a + std::sinh(r1) * std::sinh(r2) * b * b));
}

Instance generate_one(const GeneratorSpec& spec, std::size_t index) {
  Instance inst;
  inst.index = index;
  inst.seed = trial_seed(spec.seed, index);
  Rng rng(inst.seed);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RandomTreeSpec>) {
          inst.data = random_tree(s, rng);
        } else if constexpr (std::is_same_v<S, ProductOfTreesSpec>) {
          if (s.min_factors < 1 || s.min_factors > s.max_factors) bad_spec("need 1 <= min_factors <= max_factors");
          ProductSixConfig<Rational> product;
          const std::size_t factors = uniform_index(rng, s.min_factors, s.max_factors);
          for (std::size_t f = 0; f < factors; ++f) product.factors.push_back(random_tree(s.factor, rng));
          inst.data = std::move(product);
        } else if constexpr (std::is_same_v<S, EuclideanSampleSpec>) {
          std::vector<std::vector<double>> coords;
          inst.data = euclidean(s, rng, coords);
          inst.coordinates = std::move(coords);
        } else if constexpr (std::is_same_v<S, HyperbolicSampleSpec>) {
          inst.data = hyperbolic(s, rng);
        } else {
          inst.data = perturbed(s, rng);
        }
      },
      spec.kind);
  return inst;
}

std::vector<Instance> generate(const GeneratorSpec& spec, std::size_t count) {
  std::vector<Instance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(generate_one(spec, i));
  return out;
}

std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("OCTACOMP_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return std::max<std::size_t>(1, std::min(n, std::max<std::size_t>(jobs, 1)));
}

CampaignReport run_theorem_campaign(const GeneratorSpec& spec, std::size_t count, const CampaignOptions& options) {
  if (!std::holds_alternative<RandomTreeSpec>(spec.kind) && !std::holds_alternative<ProductOfTreesSpec>(spec.kind)) {
    bad_spec("the theorem campaign needs a tree or product generator");
  }
  return run_trials("theorem", spec, count, options, [&](const Instance& inst) {
    Trial t;
    if (const auto* cfg = std::get_if<TreeSixConfig<Rational>>(&inst.data)) {
      if (options.exact) {
        theorem_tree(t, *cfg, options);
      } else {
        theorem_tree(t, to_float(*cfg), options);
      }
      if (options.cross_check) cross_check(t, o3_constraints(*cfg), options);
    } else {
      const auto& product = std::get<ProductSixConfig<Rational>>(inst.data);
      if (options.exact) {
        theorem_product(t, product, options);
      } else {
        theorem_product(t, to_float(product), options);
      }
      if (options.cross_check) cross_check(t, o3_constraints(product), options);
    }
    return t;
  });
}

CampaignReport run_question_campaign(const GeneratorSpec& spec, std::size_t count, const CampaignOptions& options) {
  if (std::holds_alternative<RandomTreeSpec>(spec.kind) || std::holds_alternative<ProductOfTreesSpec>(spec.kind)) {
    bad_spec("the question campaign needs a metric generator");
  }
  const ComparisonGraph o3 = octahedron_graph();
  const auto matchings = perfect_matchings_of_six();
  return run_trials("question", spec, count, options, [&](const Instance& inst) {
    Trial t;
    const auto& space = metric_of(inst);
    for (const auto& order : matchings) {
      const auto labeling = matching_labeling(space, order);
      const FeasibilityReport rep = check_comparison(o3, space, labeling, options.feasibility);
      ++t.checks;
      if (rep.verdict == Verdict::Feasible) {
        note_slack(t, rep.verification->min_slack);
      } else if (rep.verdict == Verdict::Infeasible) {
        t.status = Trial::Status::Fail;
        if (!t.reason.empty()) t.reason += "; ";
        t.reason += "Infeasible for diagonals " + matching_name(labeling);
      } else if (t.status == Trial::Status::Pass) {
        t.status = Trial::Status::Undecided;
      }
    }
    return t;
  });
}

CampaignReport run_separation_search(const GeneratorSpec& spec, std::size_t count, const CampaignOptions& options) {
  if (std::holds_alternative<RandomTreeSpec>(spec.kind) || std::holds_alternative<ProductOfTreesSpec>(spec.kind)) {
    bad_spec("the separation search needs a metric generator");
  }
  const ComparisonGraph o3 = octahedron_graph();
  const auto matchings = perfect_matchings_of_six();
  FeasibilityOptions tight = options.feasibility;
  tight.tol = std::min(tight.tol, 1e-10);
  tight.max_iter *= 2;
  tight.window *= 2;
  return run_trials("separation", spec, count, options, [&](const Instance& inst) {
    Trial t;
    const auto& space = metric_of(inst);
    const C4Summary c4 = check_all_c4_sublabelings(space, options.feasibility);
    t.checks += c4.checks.size();
    if (c4.infeasible > 0) {
      t.filtered = true;
      return t;
    }
    if (c4.undecided > 0) {
      t.status = Trial::Status::Undecided;
      return t;
    }
    for (const auto& order : matchings) {
      const auto labeling = matching_labeling(space, order);
      FeasibilityReport rep = check_comparison(o3, space, labeling, options.feasibility);
      ++t.checks;
      if (rep.verdict == Verdict::Infeasible) {
        rep = check_comparison(o3, space, labeling, tight);
        ++t.checks;
      }
      if (rep.verdict == Verdict::Feasible) {
        note_slack(t, rep.verification->min_slack);
      } else if (rep.verdict == Verdict::Infeasible) {
        t.status = Trial::Status::Fail;
        if (!t.reason.empty()) t.reason += "; ";
        t.reason += "C4 holds but O3 is Infeasible for diagonals " + matching_name(labeling);
      } else if (t.status == Trial::Status::Pass) {
        t.status = Trial::Status::Undecided;
      }
    }
    return t;
  });
}

}  // namespace octacomp
