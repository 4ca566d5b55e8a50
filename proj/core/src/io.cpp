#include "octacomp/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

namespace octacomp::io {

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::ParseError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string string_from(const json& j, const char* what) {
  if (!j.is_string()) fail(std::string(what) + " must be a string");
  return j.get<std::string>();
}

std::size_t role_of(const std::string& name) {
  for (std::size_t r = 0; r < 6; ++r) {
    if (name == kRoleNames[r]) return r;
  }
  fail("unknown role '" + name + "'");
}

json distances_json(const std::array<std::array<Rational, 6>, 6>& d, bool exact) {
  json out = json::array();
  for (const auto& row : d) {
    json r = json::array();
    for (const auto& v : row) r.push_back(number_json(v, exact));
    out.push_back(std::move(r));
  }
  return out;
}

json distances_json(const std::array<std::array<double, 6>, 6>& d, bool exact) {
  json out = json::array();
  for (const auto& row : d) {
    json r = json::array();
    for (double v : row) r.push_back(number_json(v, exact));
    out.push_back(std::move(r));
  }
  return out;
}

template <Scalar T>
json raw_point_json(const TreePoint<T>& p, bool exact) {
  if (p.is_vertex()) return json{{"vertex_id", p.index}};
  return json{{"edge_id", p.index}, {"offset", number_json(p.offset, exact)}};
}

json tree_spec_json(const RandomTreeSpec& s) {
  return json{{"type", "random_tree"},
              {"max_vertices", s.max_vertices},
              {"min_length", to_string(s.min_length)},
              {"max_length", to_string(s.max_length)},
              {"denominator", s.denominator},
              {"point_steps", s.point_steps},
              {"reuse_probability", s.reuse_probability}};
}

RandomTreeSpec tree_spec_from(const json& j) {
  RandomTreeSpec s;
  s.max_vertices = j.value("max_vertices", s.max_vertices);
  if (j.contains("min_length")) s.min_length = number_from_json<Rational>(j.at("min_length"));
  if (j.contains("max_length")) s.max_length = number_from_json<Rational>(j.at("max_length"));
  s.denominator = j.value("denominator", s.denominator);
  s.point_steps = j.value("point_steps", s.point_steps);
  s.reuse_probability = j.value("reuse_probability", s.reuse_probability);
  return s;
}

json kind_json(const GeneratorKind& kind);

GeneratorKind kind_from(const json& j) {
  const std::string type = string_from(field(j, "type"), "generator type");
  if (type == "random_tree") return tree_spec_from(j);
  if (type == "product_of_trees") {
    ProductOfTreesSpec s;
    if (j.contains("factor")) s.factor = tree_spec_from(j.at("factor"));
    s.min_factors = j.value("min_factors", s.min_factors);
    s.max_factors = j.value("max_factors", s.max_factors);
    return s;
  }
  if (type == "euclidean") {
    EuclideanSampleSpec s;
    s.dim = j.value("dim", s.dim);
    s.scale = j.value("scale", s.scale);
    return s;
  }
  if (type == "hyperbolic") {
    HyperbolicSampleSpec s;
    s.max_radius = j.value("max_radius", s.max_radius);
    return s;
  }
  if (type == "perturbed") {
    PerturbedMetricSpec s;
    s.epsilon = j.value("epsilon", s.epsilon);
    if (j.contains("base")) {
      GeneratorKind base = kind_from(j.at("base"));
      if (auto* t = std::get_if<RandomTreeSpec>(&base)) {
        s.base = *t;
      } else if (auto* e = std::get_if<EuclideanSampleSpec>(&base)) {
        s.base = *e;
      } else if (auto* h = std::get_if<HyperbolicSampleSpec>(&base)) {
        s.base = *h;
      } else {
        throw Error(ErrorKind::BadSpec, "perturbation base must be a tree, Euclidean or hyperbolic sample");
      }
    }
    return s;
  }
  throw Error(ErrorKind::BadSpec, "unknown generator type '" + type + "'");
}

json kind_json(const GeneratorKind& kind) {
  return std::visit(
      [](const auto& s) -> json {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, RandomTreeSpec>) {
          return tree_spec_json(s);
        } else if constexpr (std::is_same_v<S, ProductOfTreesSpec>) {
          return json{{"type", "product_of_trees"},
                      {"factor", tree_spec_json(s.factor)},
                      {"min_factors", s.min_factors},
                      {"max_factors", s.max_factors}};
        } else if constexpr (std::is_same_v<S, EuclideanSampleSpec>) {
          return json{{"type", "euclidean"}, {"dim", s.dim}, {"scale", s.scale}};
        } else if constexpr (std::is_same_v<S, HyperbolicSampleSpec>) {
          return json{{"type", "hyperbolic"}, {"max_radius", s.max_radius}};
        } else {
          json base = std::visit([](const auto& b) { return kind_json(GeneratorKind{b}); }, s.base);
          return json{{"type", "perturbed"}, {"base", base}, {"epsilon", s.epsilon}};
        }
      },
      kind);
}

}  // namespace

json number_json(const Rational& q, bool exact) {
  if (!exact) return q.get_d();
  return to_string(q);
}

json number_json(double v, bool) { return v; }

json number_json(const QuadraticSurd& s, bool exact) {
  if (!exact) return s.to_double();
  return json{{"r", to_string(s.rational_part())},
              {"s", to_string(s.surd_coefficient())},
              {"k", to_string(s.radicand())}};
}

template <Scalar T>
T number_from_json(const json& j) {
  if constexpr (Arith<T>::exact) {
    if (j.is_number_integer() || j.is_number_unsigned() || j.is_number_float()) {
      if (j.is_number_float() && !std::isfinite(j.get<double>())) fail("non-finite number");
      return parse_rational(j.dump());
    }
    if (j.is_string()) return parse_rational(j.get<std::string>());
    fail("expected a number or a \"p/q\" string");
  } else {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return parse_rational(j.get<std::string>()).get_d();
    fail("expected a number or a \"p/q\" string");
  }
}

template <Scalar T>
FiniteMetricSpace<T> metric_from_json(const json& j, double tol) {
  const json& rows = j.is_array() ? j : field(j, "distances");
  if (!rows.is_array()) fail("distances must be an array of rows");
  Matrix<T> dist;
  for (const auto& row : rows) {
    if (!row.is_array()) fail("distances must be an array of rows");
    std::vector<T> r;
    for (const auto& v : row) r.push_back(number_from_json<T>(v));
    dist.push_back(std::move(r));
  }
  if (j.is_object() && j.contains("labels")) {
    std::vector<std::string> labels;
    for (const auto& l : j.at("labels")) labels.push_back(string_from(l, "label"));
    return validate_metric(std::move(labels), std::move(dist), tol);
  }
  return validate_metric(std::move(dist), tol);
}

template <Scalar T>
json metric_json(const FiniteMetricSpace<T>& space, bool exact) {
  json rows = json::array();
  for (std::size_t i = 0; i < space.size(); ++i) {
    json row = json::array();
    for (std::size_t k = 0; k < space.size(); ++k) row.push_back(number_json(space(i, k), exact));
    rows.push_back(std::move(row));
  }
  return json{{"labels", space.labels()}, {"distances", rows}};
}

template <Scalar T>
TreeSixConfig<T> tree_config_from_json(const json& j) {
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  auto vertex = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    index.emplace(name, names.size());
    names.push_back(name);
    return names.size() - 1;
  };
  if (j.contains("vertices")) {
    for (const auto& v : j.at("vertices")) vertex(string_from(v, "vertex name"));
  }
  std::vector<TreeEdge<T>> edges;
  for (const auto& e : field(j, "edges")) {
    if (e.is_array() && e.size() == 3) {
      edges.push_back({vertex(string_from(e[0], "edge end")), vertex(string_from(e[1], "edge end")),
                       number_from_json<T>(e[2])});
    } else if (e.is_object()) {
      edges.push_back({vertex(string_from(field(e, "u"), "edge end")),
                       vertex(string_from(field(e, "v"), "edge end")), number_from_json<T>(field(e, "length"))});
    } else {
      fail("an edge is [u, v, length] or {\"u\", \"v\", \"length\"}");
    }
  }
  if (names.empty()) fail("a tree needs at least one vertex");
  MetricTree<T> tree(names, std::move(edges));

  auto parse_point = [&](const json& p) -> TreePoint<T> {
    if (p.is_string()) return tree.vertex_point(tree.find_vertex(p.get<std::string>()));
    if (p.is_object() && p.contains("vertex")) {
      return tree.vertex_point(tree.find_vertex(string_from(p.at("vertex"), "vertex")));
    }
    if (p.is_object() && p.contains("edge")) {
      const json& e = p.at("edge");
      if (!e.is_array() || e.size() != 2) fail("point edge must be [u, v]");
      return tree.edge_point(tree.find_vertex(string_from(e[0], "edge end")),
                             tree.find_vertex(string_from(e[1], "edge end")),
                             number_from_json<T>(field(p, "offset")));
    }
    fail("a point is a vertex name, {\"vertex\"} or {\"edge\", \"offset\"}");
  };

  const json& pts = field(j, "points");
  std::array<TreePoint<T>, 6> points;
  if (pts.is_array()) {
    if (pts.size() != 6) throw Error(ErrorKind::WrongPointCount, "expected six points");
    for (std::size_t r = 0; r < 6; ++r) points[r] = parse_point(pts[r]);
  } else if (pts.is_object()) {
    if (pts.size() != 6) throw Error(ErrorKind::WrongPointCount, "expected the six roles x, y, z, x', y', z'");
    std::array<bool, 6> seen{};
    for (const auto& [name, p] : pts.items()) {
      const std::size_t r = role_of(name);
      seen[r] = true;
      points[r] = parse_point(p);
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) fail("every role needs a point");
  } else {
    fail("points must be an object keyed by role or an array in role order");
  }
  return TreeSixConfig<T>{std::move(tree), points};
}

template <Scalar T>
json tree_json(const MetricTree<T>& tree, bool exact) {
  json edges = json::array();
  for (const auto& e : tree.edges()) {
    edges.push_back(json::array({tree.vertex_names()[e.u], tree.vertex_names()[e.v], number_json(e.length, exact)}));
  }
  return json{{"vertices", tree.vertex_names()}, {"edges", edges}};
}

template <Scalar T>
json point_json(const MetricTree<T>& tree, const TreePoint<T>& p, bool exact) {
  if (p.is_vertex()) return json{{"vertex", tree.vertex_names()[p.index]}};
  const auto& e = tree.edges()[p.index];
  return json{{"edge", json::array({tree.vertex_names()[e.u], tree.vertex_names()[e.v]})},
              {"offset", number_json(p.offset, exact)}};
}

template <Scalar T>
json tree_config_json(const TreeSixConfig<T>& cfg, bool exact) {
  json out = tree_json(cfg.tree, exact);
  json points = json::object();
  for (std::size_t r = 0; r < 6; ++r) points[kRoleNames[r]] = point_json(cfg.tree, cfg.points[r], exact);
  out["points"] = points;
  return out;
}

template <Scalar T>
ProductSixConfig<T> product_config_from_json(const json& j) {
  ProductSixConfig<T> out;
  const json& factors = field(j, "factors");
  if (!factors.is_array() || factors.empty()) throw Error(ErrorKind::BadSize, "a product needs at least one factor");
  for (const auto& f : factors) out.factors.push_back(tree_config_from_json<T>(f));
  return out;
}

template <Scalar T>
json product_config_json(const ProductSixConfig<T>& cfg, bool exact) {
  json factors = json::array();
  for (const auto& f : cfg.factors) factors.push_back(tree_config_json(f, exact));
  return json{{"factors", factors}};
}

ComparisonGraph graph_from_json(const json& j) {
  if (j.is_string()) {
    std::string name = j.get<std::string>();
    for (auto& ch : name) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (name == "o3" || name == "octahedron") return octahedron_graph();
    if (name.size() > 1 && name[0] == 'c' &&
        std::all_of(name.begin() + 1, name.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      return cycle_graph(std::stoul(name.substr(1)));
    }
    fail("unknown graph '" + j.get<std::string>() + "'");
  }
  std::vector<std::string> labels;
  for (const auto& l : field(j, "labels")) labels.push_back(string_from(l, "graph label"));
  auto endpoint = [&](const json& v) -> std::size_t {
    if (v.is_number_unsigned() || v.is_number_integer()) {
      const auto k = v.get<long long>();
      if (k < 0 || static_cast<std::size_t>(k) >= labels.size()) fail("graph vertex index out of range");
      return static_cast<std::size_t>(k);
    }
    const std::string name = string_from(v, "graph vertex");
    auto it = std::find(labels.begin(), labels.end(), name);
    if (it == labels.end()) throw Error(ErrorKind::UnknownLabel, "unknown graph vertex '" + name + "'");
    return static_cast<std::size_t>(it - labels.begin());
  };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& e : field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) fail("a graph edge is [a, b]");
    edges.emplace_back(endpoint(e[0]), endpoint(e[1]));
  }
  return ComparisonGraph(std::move(labels), edges);
}

template <class Coord>
json model_json(const ModelConfiguration<Coord>& model, bool exact) {
  json points = json::object();
  for (std::size_t i = 0; i < model.labels.size(); ++i) {
    json coords = json::array();
    for (const auto& c : model.points[i]) coords.push_back(number_json(c, exact));
    points[model.labels[i]] = coords;
  }
  return json{{"dimension", model.dimension()}, {"labels", model.labels}, {"points", points}};
}

json verification_json(const VerificationReport& report) {
  auto entry = [](const SlackEntry& e) {
    return json{{"i", e.i},
                {"j", e.j},
                {"sense", e.sense == Sense::Upper ? "upper" : "lower"},
                {"bound", e.bound},
                {"distance", e.distance},
                {"slack", e.slack}};
  };
  json violations = json::array();
  for (const auto& v : report.violations) violations.push_back(entry(v));
  return json{{"passed", report.passed},
              {"exact", report.exact},
              {"min_slack", report.min_slack},
              {"constraints", report.entries.size()},
              {"violations", violations}};
}

template <Scalar T>
json trace_json(const BuildTrace<T>& trace, bool exact) {
  json shrinks = json::array();
  for (const auto& s : trace.shrinks) {
    shrinks.push_back(json{{"connector_length", number_json(s.connector_length, exact)},
                           {"before", distances_json(s.before, exact)},
                           {"after", distances_json(s.after, exact)}});
  }
  json moves = json::array();
  for (const auto& m : trace.moves) {
    moves.push_back(json{{"role", kRoleNames[m.role]},
                         {"from", raw_point_json(m.from, exact)},
                         {"to", raw_point_json(m.to, exact)},
                         {"before", distances_json(m.before, exact)},
                         {"after", distances_json(m.after, exact)}});
  }
  json automorphism = json::array();
  for (auto r : trace.automorphism) automorphism.push_back(kRoleNames[r]);
  json coincident = json::array();
  for (const auto& cls : trace.coincident) {
    json names = json::array();
    for (auto r : cls) names.push_back(kRoleNames[r]);
    coincident.push_back(names);
  }
  json out{{"case", trace.case_taken},
           {"automorphism", automorphism},
           {"attempts", trace.attempts},
           {"coincident", coincident},
           {"shrinks", shrinks},
           {"moves", moves}};
  if (trace.abc) {
    out["abc"] = json{{"a", kRoleNames[trace.abc->a]}, {"b", kRoleNames[trace.abc->b]}, {"c", kRoleNames[trace.abc->c]}};
  }
  if (trace.host) {
    out["host"] = std::string(kRoleNames[*trace.host]) + kRoleNames[partner(*trace.host)];
    out["flip_y"] = trace.flip_y;
    out["flip_z"] = trace.flip_z;
  }
  return out;
}

json feasibility_json(const FeasibilityReport& report) {
  json out{{"verdict", to_string(report.verdict)},
           {"max_violation", report.max_violation},
           {"residual", report.residual},
           {"iterations", report.iterations}};
  out["model"] = report.model ? model_json(*report.model, false) : json(nullptr);
  if (report.verification) out["verification"] = verification_json(*report.verification);
  return out;
}

json generator_json(const GeneratorSpec& spec) {
  json out = kind_json(spec.kind);
  out["seed"] = spec.seed;
  return out;
}

GeneratorSpec generator_from_json(const json& j) {
  try {
    GeneratorSpec spec;
    spec.kind = kind_from(j);
    spec.seed = j.value("seed", std::uint64_t{0});
    return spec;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::BadSpec, e.what());
  }
}

json instance_json(const Instance& instance) {
  json out{{"index", instance.index}, {"seed", instance.seed}};
  std::visit(
      [&](const auto& data) {
        using D = std::decay_t<decltype(data)>;
        if constexpr (std::is_same_v<D, std::monostate>) {
          return;
        } else if constexpr (std::is_same_v<D, TreeSixConfig<Rational>>) {
          out["tree"] = tree_config_json(data, true);
        } else if constexpr (std::is_same_v<D, ProductSixConfig<Rational>>) {
          out["product"] = product_config_json(data, true);
        } else {
          // Shortest round-trip decimals keep replays bit-exact.
          out["metric"] = metric_json(data, false);
        }
      },
      instance.data);
  if (instance.coordinates) out["coordinates"] = *instance.coordinates;
  return out;
}

Instance instance_from_json(const json& j) {
  Instance out;
  out.index = j.value("index", std::size_t{0});
  out.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("tree")) {
    out.data = tree_config_from_json<Rational>(j.at("tree"));
  } else if (j.contains("product")) {
    out.data = product_config_from_json<Rational>(j.at("product"));
  } else if (j.contains("metric")) {
    out.data = metric_from_json<double>(j.at("metric"));
  } else {
    fail("instance needs a tree, product or metric");
  }
  if (j.contains("coordinates")) out.coordinates = j.at("coordinates").get<std::vector<std::vector<double>>>();
  return out;
}

json campaign_json(const CampaignReport& report, bool include_wall_time) {
  json findings = json::array();
  for (const auto& f : report.findings) {
    findings.push_back(json{{"index", f.index}, {"reason", f.reason}, {"replay", f.replay}});
  }
  json out{{"campaign", report.campaign},
           {"trials", report.trials},
           {"passes", report.passes},
           {"failures", report.failures},
           {"undecided", report.undecided},
           {"filtered", report.filtered},
           {"checks", report.checks},
           {"min_slack", report.has_slack ? json(report.min_slack) : json(nullptr)},
           {"findings", findings}};
  if (include_wall_time) out["wall_seconds"] = report.wall_seconds;
  return out;
}

#define OCTACOMP_INSTANTIATE(T)                                                    \
  template T number_from_json<T>(const json&);                                     \
  template FiniteMetricSpace<T> metric_from_json<T>(const json&, double);          \
  template json metric_json<T>(const FiniteMetricSpace<T>&, bool);                 \
  template TreeSixConfig<T> tree_config_from_json<T>(const json&);                 \
  template json tree_json<T>(const MetricTree<T>&, bool);                          \
  template json point_json<T>(const MetricTree<T>&, const TreePoint<T>&, bool);    \
  template json tree_config_json<T>(const TreeSixConfig<T>&, bool);                \
  template ProductSixConfig<T> product_config_from_json<T>(const json&);           \
  template json product_config_json<T>(const ProductSixConfig<T>&, bool);          \
  template json trace_json<T>(const BuildTrace<T>&, bool);

OCTACOMP_INSTANTIATE(double)
OCTACOMP_INSTANTIATE(Rational)

#undef OCTACOMP_INSTANTIATE

template json model_json<double>(const ModelConfiguration<double>&, bool);
template json model_json<QuadraticSurd>(const ModelConfiguration<QuadraticSurd>&, bool);

}  // namespace octacomp::io
