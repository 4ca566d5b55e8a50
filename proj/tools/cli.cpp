#include "cli.hpp"

#include "octacomp/builder.hpp"
#include "octacomp/feasibility.hpp"
#include "octacomp/harness.hpp"
#include "octacomp/io.hpp"
#include "octacomp/metric.hpp"
#include "octacomp/tree.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace octacomp::cli {

namespace {

using io::json;

struct Globals {
  double tol = kDefaultTol;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  bool exact = false;
  bool as_float = false;
  std::string out;
  std::size_t max_iter = FeasibilityOptions{}.max_iter;
  std::size_t threads = 0;
};

json envelope(const std::string& command) { return json{{"schema", io::kSchema}, {"command", command}}; }

json error_json(const std::string& kind, const std::string& message) {
  json out{{"schema", io::kSchema}, {"error", {{"kind", kind}, {"message", message}}}};
  return out;
}

json read_json(const std::string& path, std::istream& in) {
  try {
    if (path.empty() || path == "-") return json::parse(in);
    std::ifstream file(path);
    if (!file) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
    return json::parse(file);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, e.what());
  }
}

json violations_json(const MetricValidationError& e) {
  json list = json::array();
  for (const auto& v : e.violations()) {
    list.push_back(json{{"kind", to_string(v.kind)}, {"i", v.i}, {"j", v.j}, {"k", v.k}});
  }
  return list;
}

FeasibilityOptions feasibility_options(const Globals& g) {
  FeasibilityOptions opts;
  opts.tol = g.tol;
  opts.max_iter = g.max_iter;
  return opts;
}

template <Scalar T>
json validate(const json& input, const Globals& g, bool exact) {
  json out = envelope("validate");
  try {
    const auto space = io::metric_from_json<T>(input, g.tol);
    out["valid"] = true;
    out["size"] = space.size();
    const AdditivityResult add = is_additive(space, exact ? 0.0 : g.tol);
    out["additive"] = add.additive;
    if (add.witness) {
      json quad = json::array();
      for (auto k : *add.witness) quad.push_back(space.label(k));
      out["non_additive_quadruple"] = quad;
    }
  } catch (const MetricValidationError& e) {
    out["valid"] = false;
    out["violations"] = violations_json(e);
  }
  return out;
}

template <Scalar T>
json reconstruct(const json& input, const Globals& g, bool exact) {
  const auto space = io::metric_from_json<T>(input, g.tol);
  const auto rec = tree_from_additive_metric(space, exact ? 0.0 : g.tol);
  json out = envelope("reconstruct-tree");
  out["tree"] = io::tree_json(rec.tree, exact);
  json points = json::object();
  for (std::size_t i = 0; i < space.size(); ++i) points[space.label(i)] = io::point_json(rec.tree, rec.points[i], exact);
  out["points"] = points;
  return out;
}

template <Scalar T>
json model_tree(const TreeSixConfig<T>& cfg, const Globals& g, bool exact) {
  const TreeBuild<T> build = build_tree_model(cfg, BuildOptions{g.tol});
  json out = envelope("model-tree");
  out["model"] = io::model_json(build.model, exact);
  out["trace"] = io::trace_json(build.trace, exact);
  out["verification"] = io::verification_json(build.trace.verification);
  return out;
}

template <Scalar T>
json model_product(const ProductSixConfig<T>& cfg, const Globals& g, bool exact) {
  const ProductBuild<T> build = build_product_model(cfg, BuildOptions{g.tol});
  json out = envelope("model-product");
  out["model"] = io::model_json(build.model, exact);
  json traces = json::array();
  for (const auto& t : build.traces) traces.push_back(io::trace_json(t, exact));
  out["traces"] = traces;
  out["verification"] = io::verification_json(build.verification);
  return out;
}

std::vector<std::string> split_labels(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct CheckArgs {
  std::string input;
  std::string graph = "o3";
  std::string labeling;
  bool all_matchings = false;
  bool c4_subchecks = false;
};

json check(const CheckArgs& a, std::istream& in, const Globals& g) {
  const auto space = io::metric_from_json<double>(read_json(a.input, in), g.tol);
  const FeasibilityOptions opts = feasibility_options(g);
  json out = envelope("check");
  if (a.c4_subchecks) {
    const C4Summary summary = check_all_c4_sublabelings(space, opts);
    json checks = json::array();
    for (const auto& c : summary.checks) {
      json cycle = json::array();
      for (const auto& k : c.cycle) cycle.push_back(k);
      checks.push_back(json{{"cycle", cycle}, {"report", io::feasibility_json(c.report)}});
    }
    out["c4"] = json{{"feasible", summary.feasible},
                     {"infeasible", summary.infeasible},
                     {"undecided", summary.undecided},
                     {"checks", checks}};
    return out;
  }
  const json graph_spec = !a.graph.empty() && a.graph.front() == '{' ? json::parse(a.graph) : json(a.graph);
  const ComparisonGraph graph = io::graph_from_json(graph_spec);
  if (a.all_matchings) {
    if (space.size() != 6) throw Error(ErrorKind::WrongPointCount, "all matchings need six points");
    json reports = json::array();
    for (const auto& order : perfect_matchings_of_six()) {
      std::vector<std::string> labeling;
      for (auto k : order) labeling.push_back(space.label(k));
      reports.push_back(json{{"labeling", labeling},
                             {"report", io::feasibility_json(check_comparison(graph, space, labeling, opts))}});
    }
    out["matchings"] = reports;
    return out;
  }
  const FeasibilityReport rep = a.labeling.empty()
                                    ? check_comparison(graph, space, opts)
                                    : check_comparison(graph, space, split_labels(a.labeling), opts);
  out["report"] = io::feasibility_json(rep);
  return out;
}

// Campaign file: {"campaign": "theorem" | "question" | "separation",
// "generator": {...}, "trials": n, "cross_check": bool}. A replay file has
// the same keys plus "index" and reruns that single trial.
int campaign(const std::string& input, std::istream& in, const Globals& g, bool timing,
             const std::string& replay_dir, json& out) {
  const json spec_json = read_json(input, in);
  if (!spec_json.is_object() || !spec_json.contains("generator")) {
    throw Error(ErrorKind::BadSpec, "a campaign file needs a \"generator\"");
  }
  GeneratorSpec spec = io::generator_from_json(spec_json.at("generator"));
  if (g.seed) spec.seed = *g.seed;
  const std::string kind = spec_json.value("campaign", std::string("theorem"));

  CampaignOptions opts;
  opts.exact = !g.as_float;
  opts.cross_check = spec_json.value("cross_check", false);
  opts.tol = g.tol;
  opts.feasibility = feasibility_options(g);
  opts.threads = g.threads;
  if (!replay_dir.empty()) opts.replay_dir = replay_dir;
  std::size_t count = spec_json.value("trials", std::size_t{100});
  if (spec_json.contains("index")) {
    opts.first_index = spec_json.at("index").get<std::size_t>();
    count = 1;
  }
  if (g.trials) count = *g.trials;

  CampaignReport report;
  if (kind == "theorem") {
    report = run_theorem_campaign(spec, count, opts);
  } else if (kind == "question") {
    report = run_question_campaign(spec, count, opts);
  } else if (kind == "separation") {
    report = run_separation_search(spec, count, opts);
  } else {
    throw Error(ErrorKind::BadSpec, "unknown campaign '" + kind + "'");
  }
  out = envelope("campaign");
  out["generator"] = io::generator_json(spec);
  out["first_index"] = opts.first_index;
  out["report"] = io::campaign_json(report, timing);
  return report.findings.empty() ? kExitOk : kExitFindings;
}

void emit(const json& doc, const Globals& g, std::ostream& out) {
  const std::string text = doc.dump(2);
  out << text << '\n';
  if (!g.out.empty()) {
    std::ofstream file(g.out);
    if (!file) throw Error(ErrorKind::ParseError, "cannot write '" + g.out + "'");
    file << text << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out) {
  CLI::App app{"Euclidean comparison models for tree configurations and graph comparison checks", "octacomp"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  Globals g;
  app.add_option("--tol", g.tol, "Tolerance for float-mode checks")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Override the generator seed");
  app.add_option("--trials", g.trials, "Number of campaign trials");
  auto* exact = app.add_flag("--exact", g.exact, "Exact rational arithmetic (default for tree inputs)");
  auto* as_float = app.add_flag("--float", g.as_float, "Double precision arithmetic");
  exact->excludes(as_float);
  app.add_option("--out", g.out, "Also write the JSON result to this file");
  app.add_option("--max-iter", g.max_iter, "Feasibility iteration budget")->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Campaign worker threads (0: automatic)");

  std::string input;
  auto* validate_cmd = app.add_subcommand("validate", "Validate a distance matrix and test additivity");
  validate_cmd->add_option("input", input, "Metric JSON (default stdin)");
  auto* reconstruct_cmd = app.add_subcommand("reconstruct-tree", "Realize an additive metric as a tree");
  reconstruct_cmd->add_option("input", input, "Metric JSON (default stdin)");
  auto* tree_cmd = app.add_subcommand("model-tree", "Build and verify a model for six tree points");
  tree_cmd->add_option("input", input, "Tree configuration JSON (default stdin)");
  auto* product_cmd = app.add_subcommand("model-product", "Build and verify a model in a product of trees");
  product_cmd->add_option("input", input, "Product configuration JSON (default stdin)");

  CheckArgs check_args;
  auto* check_cmd = app.add_subcommand("check", "Graph comparison feasibility for a finite metric");
  check_cmd->add_option("input", check_args.input, "Metric JSON (default stdin)");
  check_cmd->add_option("--graph", check_args.graph, "o3, cN or inline graph JSON");
  check_cmd->add_option("--labeling", check_args.labeling, "Comma-separated point labels in graph vertex order");
  check_cmd->add_flag("--all-matchings", check_args.all_matchings, "Octahedron check under all 15 diagonal matchings");
  check_cmd->add_flag("--c4-subchecks", check_args.c4_subchecks, "All 4-cycle checks on four-point subsets");

  bool timing = false;
  std::string replay_dir;
  auto* campaign_cmd = app.add_subcommand("campaign", "Run a randomized campaign or replay one finding");
  campaign_cmd->add_option("spec", input, "Campaign or replay JSON (default stdin)");
  campaign_cmd->add_flag("--timing", timing, "Include wall time in the report");
  campaign_cmd->add_option("--replay-dir", replay_dir, "Directory for finding replay files");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    emit(json{{"schema", io::kSchema}, {"help", app.help()}}, Globals{}, out);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    emit(error_json("UsageError", e.what()), Globals{}, out);
    return kExitError;
  }

  try {
    json result;
    int code = kExitOk;
    if (*validate_cmd || *reconstruct_cmd) {
      const json doc = read_json(input, in);
      const bool is_exact = !g.as_float;
      if (*validate_cmd) {
        result = is_exact ? validate<Rational>(doc, g, true) : validate<double>(doc, g, false);
      } else {
        result = is_exact ? reconstruct<Rational>(doc, g, true) : reconstruct<double>(doc, g, false);
      }
    } else if (*tree_cmd) {
      const auto cfg = io::tree_config_from_json<Rational>(read_json(input, in));
      result = g.as_float ? model_tree(to_float(cfg), g, false) : model_tree(cfg, g, true);
    } else if (*product_cmd) {
      const auto cfg = io::product_config_from_json<Rational>(read_json(input, in));
      result = g.as_float ? model_product(to_float(cfg), g, false) : model_product(cfg, g, true);
    } else if (*check_cmd) {
      result = check(check_args, in, g);
    } else {
      code = campaign(input, in, g, timing, replay_dir, result);
    }
    emit(result, g, out);
    return code;
  } catch (const MetricValidationError& e) {
    json err = error_json(std::string(to_string(e.kind())), e.what());
    err["error"]["violations"] = violations_json(e);
    out << err.dump(2) << '\n';
  } catch (const Error& e) {
    out << error_json(std::string(to_string(e.kind())), e.what()).dump(2) << '\n';
  } catch (const json::exception& e) {
    out << error_json("ParseError", e.what()).dump(2) << '\n';
  } catch (const std::exception& e) {
    out << error_json("InternalError", e.what()).dump(2) << '\n';
  }
  return kExitError;
}

}  // namespace octacomp::cli
