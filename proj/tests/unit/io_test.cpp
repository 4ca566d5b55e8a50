#include "octacomp/io.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace octacomp;
using io::json;

TEST_CASE("numbers: exact strings, surd objects, plain floats") {
  CHECK(io::number_json(Rational(3, 4), true) == "3/4");
  CHECK(io::number_json(Rational(3, 4), false) == 0.75);
  CHECK(io::number_json(0.5, true) == 0.5);
  const json s = io::number_json(QuadraticSurd(Rational(1), Rational(1, 2), Rational(3)), true);
  CHECK(s == json{{"r", "1"}, {"s", "1/2"}, {"k", "3"}});
  CHECK(io::number_from_json<Rational>(json("5/10")) == Rational(1, 2));
  CHECK(io::number_from_json<Rational>(json(0.25)) == Rational(1, 4));
  CHECK(io::number_from_json<Rational>(json(3)) == 3);
  CHECK(io::number_from_json<double>(json("1/8")) == 0.125);
  CHECK_THROWS_AS(io::number_from_json<double>(json::array()), Error);
}

TEST_CASE("metric documents round-trip") {
  const json doc = json::parse(R"({"labels": ["p", "q", "r"], "distances": [[0, "1/2", 1], ["1/2", 0, "1/2"], [1, "1/2", 0]]})");
  const auto space = io::metric_from_json<Rational>(doc);
  CHECK(space(0, 1) == Rational(1, 2));
  CHECK(io::metric_json(space, true) == json::parse(R"({"labels": ["p", "q", "r"], "distances": [["0", "1/2", "1"], ["1/2", "0", "1/2"], ["1", "1/2", "0"]]})"));
  CHECK(io::metric_from_json<double>(json::parse("[[0, 2], [2, 0]]"))(0, 1) == 2.0);
  CHECK_THROWS_AS(io::metric_from_json<double>(json::parse(R"({"distances": 3})")), Error);
}

TEST_CASE("tree configurations accept vertex names, edge offsets and both edge forms") {
  const json doc = json::parse(R"({
    "edges": [["a", "b", "3/2"], {"u": "b", "v": "c", "length": 2}],
    "points": {"x": "a", "y": {"vertex": "c"}, "z": {"edge": ["c", "b"], "offset": "1/2"},
               "x'": {"edge": ["a", "b"], "offset": 1}, "y'": "b", "z'": "c"}})");
  const auto cfg = io::tree_config_from_json<Rational>(doc);
  CHECK(cfg.tree.vertex_count() == 3);
  CHECK(cfg.tree.distance(cfg.points[0], cfg.points[2]) == Rational(3));
  CHECK(cfg.tree.distance(cfg.points[3], cfg.points[4]) == Rational(1, 2));
  const auto back = io::tree_config_from_json<Rational>(io::tree_config_json(cfg, true));
  CHECK(oracle::tree_pairwise(back) == oracle::tree_pairwise(cfg));

  json missing = doc;
  missing["points"].erase("z'");
  CHECK_THROWS_AS(io::tree_config_from_json<Rational>(missing), Error);
  json unknown = doc;
  unknown["points"]["x"] = "nowhere";
  CHECK_THROWS_AS(io::tree_config_from_json<Rational>(unknown), Error);
}

TEST_CASE("property: random tree configurations survive a JSON round trip") {
  oracle::Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = oracle::random_tree_config(rng);
    const auto back = io::tree_config_from_json<Rational>(json::parse(io::tree_config_json(cfg, true).dump()));
    CHECK(oracle::tree_pairwise(back) == oracle::tree_pairwise(cfg));
  }
}

TEST_CASE("graphs by name or by edge list") {
  CHECK(io::graph_from_json("o3").edge_count() == 12);
  CHECK(io::graph_from_json("C5").size() == 5);
  const auto g = io::graph_from_json(json::parse(R"({"labels": ["a", "b", "c"], "edges": [["a", "b"], [1, 2]]})"));
  CHECK(g.adjacent(0, 1));
  CHECK(g.adjacent(1, 2));
  CHECK_FALSE(g.adjacent(0, 2));
  CHECK_THROWS_AS(io::graph_from_json("k5"), Error);
}

TEST_CASE("generator specs and instances round-trip") {
  PerturbedMetricSpec p;
  p.base = RandomTreeSpec{};
  p.epsilon = 0.125;
  for (const GeneratorSpec& spec : {GeneratorSpec{RandomTreeSpec{}, 3}, GeneratorSpec{ProductOfTreesSpec{}, 4},
                                    GeneratorSpec{EuclideanSampleSpec{2, 5.0}, 5}, GeneratorSpec{HyperbolicSampleSpec{1.5}, 6},
                                    GeneratorSpec{p, 7}}) {
    const json j = io::generator_json(spec);
    CHECK(io::generator_json(io::generator_from_json(json::parse(j.dump()))) == j);
    const Instance inst = generate_one(spec, 2);
    const json ij = io::instance_json(inst);
    CHECK(io::instance_json(io::instance_from_json(json::parse(ij.dump()))) == ij);
  }
  CHECK_THROWS_AS(io::generator_from_json(json::parse(R"({"type": "sphere"})")), Error);
  CHECK_THROWS_AS(io::generator_from_json(json::parse(R"({"type": "hyperbolic", "max_radius": "far"})")), Error);
}

TEST_CASE("campaign reports omit wall time on request") {
  CampaignReport r;
  r.campaign = "theorem";
  r.wall_seconds = 1.5;
  CHECK(io::campaign_json(r, true).contains("wall_seconds"));
  CHECK_FALSE(io::campaign_json(r, false).contains("wall_seconds"));
  CHECK(io::campaign_json(r, false).at("min_slack").is_null());
}
