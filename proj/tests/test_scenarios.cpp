#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "bpp/iterate.hpp"
#include "bpp/scenarios.hpp"
#include "doctest.h"

using namespace bpp;

namespace {

std::string temp_path(const std::string& stem) {
  return "bpp_test_" + stem + ".json";
}

}  // namespace

TEST_CASE("scenario parameter validation") {
  CHECK_THROWS_AS(registration_model(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(registration_model(-1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(registration_model(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(registration_model(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(kannan_degenerate_model(0.0), std::invalid_argument);
  CHECK_THROWS_AS(necessity_counterexample(0.0), std::invalid_argument);
  CHECK_NOTHROW(registration_model(2.0, 0.99));
}

TEST_CASE("built-in scenarios pass structural validation") {
  SearchConfig cfg;
  CHECK_NOTHROW(validate_instance(registration_model(0.5, 0.5), cfg));
  CHECK_NOTHROW(validate_instance(kannan_degenerate_model(0.5), cfg));
  CHECK_NOTHROW(validate_instance(necessity_counterexample(100), cfg));
}

TEST_CASE("analytic gap matches the numeric set distance") {
  SearchConfig cfg;
  std::mt19937_64 rng(555);
  std::uniform_real_distribution<double> d_delta(0.1, 3.0);
  std::uniform_real_distribution<double> d_kappa(0.05, 0.95);
  for (int i = 0; i < 20; ++i) {
    const double delta = d_delta(rng), kappa = d_kappa(rng);
    const auto inst = registration_model(delta, kappa);
    REQUIRE(inst.known_gap.has_value());
    CHECK(*inst.known_gap == delta);
    CHECK(set_distance(inst.A, inst.B, cfg) ==
          doctest::Approx(delta).epsilon(1e-9));
  }
}

TEST_CASE("counterexample declares its analytic structure") {
  const auto inst = necessity_counterexample(100);
  CHECK(inst.known_gap == 1.0);
  CHECK(!inst.S.claims_subseq_convergent);
  CHECK(!inst.flags.s_subseq_convergent);
  CHECK(inst.domain_truncated);
  CHECK(inst.search_cap == 100.0);
  CHECK(inst.A.unbounded());
  REQUIRE(inst.beta.has_value());
  CHECK(inst.beta->eval(123.0) == doctest::Approx(1.0 / std::exp(1.0)));
}

TEST_CASE("save/load round trip preserves behavior") {
  SearchConfig cfg;
  const auto orig = registration_model(0.5, 0.5);
  const std::string path = temp_path("roundtrip");
  save_instance(orig, path);
  const auto loaded = load_instance(path, cfg);
  std::remove(path.c_str());

  CHECK(loaded.A.kind() == orig.A.kind());
  CHECK(loaded.known_gap == orig.known_gap);
  // the maps evaluate identically on a parameter sweep
  for (int i = 0; i <= 32; ++i) {
    const Point x = orig.A.at(double(i) / 32.0);
    CHECK(distance(loaded.T.eval(x), orig.T.eval(x)) == 0.0);
    CHECK(distance(loaded.S.eval(x), orig.S.eval(x)) == 0.0);
  }
  REQUIRE(loaded.beta.has_value());
  CHECK(loaded.beta->eval(0.3) == orig.beta->eval(0.3));
}

TEST_CASE("serialization is bitwise stable across a double round trip") {
  SearchConfig cfg;
  const auto inst = necessity_counterexample(100);
  const std::string once = instance_to_json(inst);
  const auto reparsed = parse_instance(once, cfg);
  const std::string twice = instance_to_json(reparsed);
  CHECK(once == twice);

  // exp_coord survives the trip exactly
  const Point probe{{0, 17.25}};
  CHECK(reparsed.S.eval(probe)[1] == inst.S.eval(probe)[1]);
}

TEST_CASE("schema violations carry a useful location") {
  SearchConfig cfg;
  CHECK_THROWS_WITH_AS(parse_instance("{not json", cfg),
                       doctest::Contains("instance schema violation"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_instance(R"({"dim": 2})", cfg),
                       doctest::Contains("missing field 'A'"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_instance(
          R"({"dim": 2, "A": {"kind": "blob"}, "B": {"kind": "finite", "points": [["1","0"]]}, "T": {"kind": "identity"}, "S": {"kind": "identity"}})",
          cfg),
      doctest::Contains("unknown set kind"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_instance(
          R"({"dim": 2, "A": {"kind": "finite", "points": [["0","zero"]]}, "B": {"kind": "finite", "points": [["1","0"]]}, "T": {"kind": "identity"}, "S": {"kind": "identity"}})",
          cfg),
      doctest::Contains("not a decimal number"), ParseError);
  CHECK_THROWS_AS(load_instance("no_such_file.json", cfg), ParseError);
}

TEST_CASE("codomain violations are rejected at load time") {
  SearchConfig cfg;
  // T is the identity, so T(A) lies in A, not in B
  const std::string bad = R"({
    "dim": 2,
    "A": {"kind": "finite", "points": [["0","0"]]},
    "B": {"kind": "finite", "points": [["1","0"]]},
    "T": {"kind": "identity"},
    "S": {"kind": "identity"}
  })";
  CHECK_THROWS_WITH_AS(parse_instance(bad, cfg),
                       doctest::Contains("codomain violation"),
                       ValidationError);
}

TEST_CASE("a finite instance file loads and solves") {
  SearchConfig cfg;
  const std::string text = R"({
    "dim": 2,
    "A": {"kind": "finite", "points": [["0","0"], ["0","1"], ["0","2"]]},
    "B": {"kind": "finite", "points": [["1","0"], ["1","1"], ["1","2"]]},
    "T": {"kind": "table", "pairs": [
      [["0","0"], ["1","0"]],
      [["0","1"], ["1","0"]],
      [["0","2"], ["1","1"]]
    ]},
    "S": {"kind": "identity"},
    "beta": {"kind": "constant", "params": {"k": "0.9"}}
  })";
  const auto inst = parse_instance(text, cfg);
  const auto prox = analyze(inst, cfg);
  CHECK(prox.gap == doctest::Approx(1.0));

  // x = (0,0) is a fixed point of the proximal relation and the unique
  // best proximity point of the table map
  const auto hits = brute_force_best_proximity(inst, prox, cfg, 1e-9, 0);
  REQUIRE(hits.size() == 1);
  CHECK(hits.front().x == Point{{0, 0}});

  IterationConfig icfg;
  const auto trace = run_iteration(Point{{0, 2}}, inst, prox, cfg, icfg);
  CHECK(trace.status == IterationStatus::Converged);
  CHECK(trace.final_point == Point{{0, 0}});
}

TEST_CASE("scenario catalog") {
  const auto infos = list_scenarios();
  REQUIRE(infos.size() == 3);
  CHECK(infos[0].name == "registration");
  CHECK(infos[1].name == "kannan-degenerate");
  CHECK(infos[2].name == "counterexample");
  for (const auto& s : infos) {
    CHECK(!s.params.empty());
    CHECK(!s.description.empty());
  }
}
