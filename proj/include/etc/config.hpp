#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "etc/nonlinear.hpp"
#include "etc/plant.hpp"
#include "etc/stats.hpp"

namespace etc {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CheckConfig {
  std::uint64_t seed = 20140217;
  int prop1_samples = 100;
  int prop1_eta_samples = 20;
  int remark1_samples = 50;
};

/// Validated run configuration. `raw` keeps the canonical JSON form for
/// serialization and overrides.
struct RunConfig {
  std::optional<LinearPlant> linear;       // set when plant.type == "linear"
  std::optional<NonlinearProblem> nonlinear;
  LoopModel model;
  std::optional<double> kappa;             // plant decay rate when available

  std::vector<Generator> generators;
  std::vector<Vec> initial_conditions;
  SimConfig sim;
  CheckConfig check;
  std::string output_dir = "out";

  nlohmann::json raw;

  BatchSpec batch_spec() const;
};

/// Parses and validates a configuration document. Unknown keys are rejected;
/// errors carry the JSON path of the offending entry.
RunConfig parse_run_config(const nlohmann::json& doc);

/// Reads a file (JSON, // and /* */ comments allowed) and parses it. Parse
/// errors are reported with the line and column in the file.
RunConfig load_run_config(const std::string& path);

nlohmann::json read_config_json(const std::string& path);

/// Canonical JSON form of the validated structure; parse(serialize(parse(x)))
/// is the identity on the validated fields.
nlohmann::json serialize_run_config(const RunConfig& config);

/// Applies `KEY=VALUE` overrides to a configuration document. KEY is a
/// dotted path from the root; the bare keys sigma/theta/lambda address the
/// generator block(s), dt/horizon/event_tol/max_events/record_stride the sim
/// block, and seed the check block.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace etc
