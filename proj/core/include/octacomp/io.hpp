#pragma once

#include "octacomp/builder.hpp"
#include "octacomp/feasibility.hpp"
#include "octacomp/harness.hpp"

#include <nlohmann/json.hpp>

#include <string>

// JSON forms of every input and report. Exact numbers are written as "p/q"
// strings and quadratic surds as {"r": .., "s": .., "k": ..}; float mode
// writes plain numbers. Malformed input throws ParseError.
namespace octacomp::io {

using nlohmann::json;

inline constexpr const char* kSchema = "octacomp/1";

json number_json(const Rational& q, bool exact);
json number_json(double v, bool exact);
json number_json(const QuadraticSurd& s, bool exact);

/// Numbers, integer or decimal strings and "p/q" strings.
template <Scalar T>
T number_from_json(const json& j);

/// {"labels": [...], "distances": [[...]]}; labels default to "0", "1", ...
template <Scalar T>
FiniteMetricSpace<T> metric_from_json(const json& j, double tol = kDefaultTol);
template <Scalar T>
json metric_json(const FiniteMetricSpace<T>& space, bool exact);

/// {"vertices": [...], "edges": [[u, v, len] | {"u","v","length"}],
///  "points": {"x": "vertex" | {"edge": [u, v], "offset": t}, ...}}
template <Scalar T>
TreeSixConfig<T> tree_config_from_json(const json& j);
template <Scalar T>
json tree_json(const MetricTree<T>& tree, bool exact);
template <Scalar T>
json point_json(const MetricTree<T>& tree, const TreePoint<T>& p, bool exact);
template <Scalar T>
json tree_config_json(const TreeSixConfig<T>& cfg, bool exact);

/// {"factors": [tree config, ...]}
template <Scalar T>
ProductSixConfig<T> product_config_from_json(const json& j);
template <Scalar T>
json product_config_json(const ProductSixConfig<T>& cfg, bool exact);

/// "o3", "c4", "cN", or {"labels": [...], "edges": [[a, b], ...]} with
/// labels or indices.
ComparisonGraph graph_from_json(const json& j);

template <class Coord>
json model_json(const ModelConfiguration<Coord>& model, bool exact);
json verification_json(const VerificationReport& report);
template <Scalar T>
json trace_json(const BuildTrace<T>& trace, bool exact);
json feasibility_json(const FeasibilityReport& report);

json generator_json(const GeneratorSpec& spec);
GeneratorSpec generator_from_json(const json& j);
json instance_json(const Instance& instance);
Instance instance_from_json(const json& j);
json campaign_json(const CampaignReport& report, bool include_wall_time = true);

}  // namespace octacomp::io
