#include <doctest.h>

#include <fstream>

#include "etc/config.hpp"

using namespace etc;
using nlohmann::json;

#ifndef ETC_CONFIG_DIR
#define ETC_CONFIG_DIR "configs"
#endif

namespace {

json minimal_doc() {
  return json::parse(R"({
    "plant": {
      "type": "linear",
      "A": [[0, 1], [-2, 3]],
      "B": [[0], [1]],
      "K": [[1, -4]],
      "P": [[1, 0.25], [0.25, 1]],
      "Q": [[0.5, 0.25], [0.25, 1.5]],
      "kappa": 0.48
    },
    "generator": {"type": "static", "sigma": 0.001},
    "initial": {"states": [[10, 0]]},
    "sim": {"dt": 1e-4, "horizon": 10.0},
    "output": "out"
  })");
}

}  // namespace

TEST_CASE("parse the minimal linear configuration") {
  const RunConfig config = parse_run_config(minimal_doc());
  REQUIRE(config.linear.has_value());
  REQUIRE(config.kappa.has_value());
  CHECK(*config.kappa == doctest::Approx(0.48));
  REQUIRE(config.generators.size() == 1);
  CHECK(generator_sigma(config.generators.front()) == doctest::Approx(0.001));
  REQUIRE(config.initial_conditions.size() == 1);
  CHECK(config.initial_conditions.front()[0] == 10.0);
  CHECK(config.sim.dt == doctest::Approx(1e-4));
  CHECK(config.output_dir == "out");
}

TEST_CASE("missing plant section is named in the error") {
  json doc = minimal_doc();
  doc.erase("plant");
  try {
    parse_run_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("plant") != std::string::npos);
  }
}

TEST_CASE("unknown keys are rejected with their path") {
  json doc = minimal_doc();
  doc["sim"]["stepsize"] = 0.1;
  try {
    parse_run_config(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find("sim.stepsize") != std::string::npos);
  }
  doc = minimal_doc();
  doc["frobnicate"] = 1;
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("invalid parameters become config errors") {
  json doc = minimal_doc();
  doc["generator"]["sigma"] = 1.5;
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
  doc = minimal_doc();
  doc["plant"]["Q"] = {{1, 0}, {0, 1}};  // breaks the Lyapunov residual
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}

TEST_CASE("grid expansion with default lambda") {
  json doc = minimal_doc();
  doc.erase("generator");
  doc["grid"] = {{"sigmas", {0.001, 0.01, 0.1}},
                 {"thetas", {0, 0.01, 0.1, 1, 10, 100}},
                 {"static", true}};
  const RunConfig config = parse_run_config(doc);
  CHECK(config.generators.size() == 21);
  int dynamic_count = 0;
  for (const auto& gen : config.generators) {
    if (const auto* dyn = std::get_if<DynamicGenerator>(&gen)) {
      ++dynamic_count;
      REQUIRE(dyn->lambda.has_value());
      CHECK(*dyn->lambda == doctest::Approx((1.0 - dyn->sigma) * 0.48));
    }
  }
  CHECK(dynamic_count == 18);
}

TEST_CASE("round-trip: parse, serialize, parse is the identity") {
  const RunConfig config = parse_run_config(minimal_doc());
  const json serialized = serialize_run_config(config);
  const RunConfig reparsed = parse_run_config(serialized);
  CHECK(serialize_run_config(reparsed) == serialized);
}

TEST_CASE("overrides") {
  json doc = minimal_doc();
  apply_override(doc, "sigma=0.5");
  CHECK(doc["generator"]["sigma"] == 0.5);
  apply_override(doc, "dt=0.001");
  CHECK(doc["sim"]["dt"] == 0.001);
  apply_override(doc, "sim.horizon=5");
  CHECK(doc["sim"]["horizon"] == 5);
  apply_override(doc, "seed=42");
  CHECK(doc["check"]["seed"] == 42);
  const RunConfig config = parse_run_config(doc);
  CHECK(generator_sigma(config.generators.front()) == doctest::Approx(0.5));
  CHECK(config.check.seed == 42);

  CHECK_THROWS_AS(apply_override(doc, "novalue"), ConfigError);
  CHECK_THROWS_AS(apply_override(doc, "no.such.path=1"), ConfigError);
}

TEST_CASE("bundled configs load") {
  for (const char* name : {"paper-example.json", "paper-table.json", "paper-figure.json",
                           "paper-check.json"}) {
    const RunConfig config = load_run_config(std::string(ETC_CONFIG_DIR) + "/" + name);
    CHECK(config.linear.has_value());
  }
  const RunConfig table = load_run_config(std::string(ETC_CONFIG_DIR) + "/paper-table.json");
  CHECK(table.generators.size() == 21);
  CHECK(table.initial_conditions.size() == 30);
}

TEST_CASE("parse errors carry a line anchor") {
  const char* path = "bad_config_for_test.json";
  {
    std::ofstream os(path);
    os << "{\n  \"plant\": {\n}";  // truncated document
  }
  try {
    load_run_config(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& ex) {
    CHECK(std::string(ex.what()).find(":3:") != std::string::npos);
  }
  std::remove(path);
}

TEST_CASE("nonlinear plant from the registry") {
  json doc = {{"plant", {{"type", "scalar_cubic"}}},
              {"generator", {{"type", "dynamic"}, {"sigma", 0.1}, {"theta", 1.0},
                             {"lambda", 0.5}}},
              {"initial", {{"states", {{1.0}}}}}};
  const RunConfig config = parse_run_config(doc);
  CHECK(config.nonlinear.has_value());
  CHECK(config.model.dim == 1);
  CHECK_FALSE(config.kappa.has_value());

  // Dynamic generator without lambda/beta has no decay rate to default to.
  doc["generator"].erase("lambda");
  CHECK_THROWS_AS(parse_run_config(doc), ConfigError);
}
