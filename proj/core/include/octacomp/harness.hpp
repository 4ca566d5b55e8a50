#pragma once

#include "octacomp/builder.hpp"
#include "octacomp/feasibility.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace octacomp {

/// Random tree with uniform attachment. Edge lengths are k / denominator
/// with k uniform in [min_length, max_length] * denominator; points sit at
/// multiples of length / point_steps along uniformly chosen edges.
struct RandomTreeSpec {
  std::size_t max_vertices = 16;
  Rational min_length{1, 4};
  Rational max_length{4};
  std::size_t denominator = 64;
  std::size_t point_steps = 16;
  double reuse_probability = 0.1;  // chance a point copies an earlier one
};

struct ProductOfTreesSpec {
  RandomTreeSpec factor;
  std::size_t min_factors = 2;
  std::size_t max_factors = 4;
};

/// Uniform in the cube [0, scale]^dim.
struct EuclideanSampleSpec {
  std::size_t dim = 3;
  double scale = 1.0;
};

/// Uniform by area in the hyperbolic disk of radius max_radius (curvature -1).
struct HyperbolicSampleSpec {
  double max_radius = 3.0;
};

/// A base metric with each distance scaled by 1 + epsilon * u, u uniform in
/// [-1, 1], redrawn until the result is a metric.
struct PerturbedMetricSpec {
  std::variant<RandomTreeSpec, EuclideanSampleSpec, HyperbolicSampleSpec> base = HyperbolicSampleSpec{};
  double epsilon = 0.05;
};

using GeneratorKind = std::variant<RandomTreeSpec, ProductOfTreesSpec, EuclideanSampleSpec,
                                   HyperbolicSampleSpec, PerturbedMetricSpec>;

struct GeneratorSpec {
  GeneratorKind kind = RandomTreeSpec{};
  std::uint64_t seed = 0;
};

/// One generated six-point instance; `data` holds a tree configuration, a
/// product configuration or a plain metric (points in role order).
struct Instance {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::variant<std::monostate, TreeSixConfig<Rational>, ProductSixConfig<Rational>, FiniteMetricSpace<double>> data;
  std::optional<std::vector<std::vector<double>>> coordinates;  // Euclidean samples
};

/// Per-trial seed derived from the campaign seed and the trial index.
std::uint64_t trial_seed(std::uint64_t seed, std::size_t index);

/// Trial `index` of the deterministic stream. Throws BadSpec.
Instance generate_one(const GeneratorSpec& spec, std::size_t index);

std::vector<Instance> generate(const GeneratorSpec& spec, std::size_t count);

/// Distance in the hyperbolic plane between polar points (r1, t1), (r2, t2).
double hyperbolic_distance(double r1, double theta1, double r2, double theta2);

struct CampaignOptions {
  bool exact = true;          // tree campaigns: build in exact arithmetic
  bool cross_check = false;   // tree campaigns: also run the feasibility oracle
  double tol = kDefaultTol;
  FeasibilityOptions feasibility;
  std::size_t threads = 0;    // 0: OCTACOMP_THREADS or hardware concurrency
  std::size_t first_index = 0;  // trials run on indices first_index .. first_index + count - 1
  std::optional<std::filesystem::path> replay_dir;
};

struct Finding {
  std::size_t index = 0;
  std::string reason;
  nlohmann::json replay;  // self-contained: spec, index and instance
};

struct CampaignReport {
  std::string campaign;
  std::size_t trials = 0;
  std::size_t passes = 0;
  std::size_t failures = 0;
  std::size_t undecided = 0;
  std::size_t filtered = 0;  // separation search: trials rejected by the C4 pre-filter
  std::size_t checks = 0;    // individual verifications or feasibility runs
  double min_slack = 0.0;    // over all certified models
  bool has_slack = false;
  std::vector<Finding> findings;
  double wall_seconds = 0.0;
};

/// Builds and verifies a model for every tree or product instance.
CampaignReport run_theorem_campaign(const GeneratorSpec& spec, std::size_t count,
                                    const CampaignOptions& options = {});

/// Checks the octahedron comparison under all 15 diagonal matchings of each
/// sampled space.
CampaignReport run_question_campaign(const GeneratorSpec& spec, std::size_t count,
                                     const CampaignOptions& options = {});

/// Looks for spaces passing every C4 sub-check but failing some octahedron
/// labeling. Hits are re-checked with tightened solver settings.
CampaignReport run_separation_search(const GeneratorSpec& spec, std::size_t count,
                                     const CampaignOptions& options = {});

/// Worker count honoring OCTACOMP_THREADS.
std::size_t worker_count(std::size_t requested, std::size_t jobs);

}  // namespace octacomp
