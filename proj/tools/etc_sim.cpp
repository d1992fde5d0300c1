#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "etc/checks.hpp"
#include "etc/config.hpp"
#include "etc/csv.hpp"
#include "etc/stats.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  int jobs = 0;  // 0: all cores
  long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "run configuration file")->required();
  cmd->add_option("--out", args.out_dir, "output directory (overrides the config)");
  cmd->add_option("--override", args.overrides, "KEY=VALUE config override (repeatable)");
  cmd->add_option("--jobs", args.jobs, "worker count for batch commands (0 = all cores)");
  cmd->add_option("--seed", args.seed, "seed for the check suite");
}

etc::RunConfig load(const CommonArgs& args) {
  nlohmann::json doc = etc::read_config_json(args.config_path);
  for (const auto& assignment : args.overrides) etc::apply_override(doc, assignment);
  etc::RunConfig config = etc::parse_run_config(doc);
  if (!args.out_dir.empty()) config.output_dir = args.out_dir;
  if (args.seed >= 0) config.check.seed = static_cast<std::uint64_t>(args.seed);
  for (const auto& warning : config.linear ? config.linear->warnings
                                           : std::vector<std::string>{}) {
    std::cerr << "warning: " << warning << "\n";
  }
  return config;
}

fs::path ensure_out_dir(const etc::RunConfig& config) {
  fs::path dir(config.output_dir);
  fs::create_directories(dir);
  return dir;
}

int cmd_simulate(const CommonArgs& args) {
  const etc::RunConfig config = load(args);
  if (config.generators.empty()) throw etc::ConfigError("config: missing 'generator' section");
  if (config.initial_conditions.empty()) {
    throw etc::ConfigError("config: missing 'initial' section");
  }
  const fs::path dir = ensure_out_dir(config);
  const etc::Generator& gen = config.generators.front();
  const etc::Trajectory traj =
      etc::simulate(config.model, gen, config.initial_conditions.front(), config.sim);

  {
    std::ofstream os(dir / "trajectory.csv");
    etc::write_trajectory_csv(os, traj);
  }
  {
    std::ofstream os(dir / "executions.csv");
    etc::write_execution_times_csv(os, traj);
  }

  const auto& t = traj.execution_times;
  std::cout << "generator: " << etc::generator_label(gen) << "\n"
            << "status: " << etc::to_string(traj.status) << "\n"
            << "executions: " << t.size() << "\n";
  if (t.size() >= 2) {
    const etc::RunStats stats = etc::inter_execution_stats({t});
    std::cout << "inter-execution mean: " << stats.mean << " s\n"
              << "inter-execution min: " << stats.min << " s\n";
  }
  std::cout << "final V: " << traj.V_values.back() << "\n";
  return 0;
}

int cmd_table(const CommonArgs& args) {
  const etc::RunConfig config = load(args);
  if (config.generators.empty()) {
    throw etc::ConfigError("config: missing 'generators' or 'grid' section");
  }
  if (config.initial_conditions.empty()) {
    throw etc::ConfigError("config: missing 'initial' section");
  }
  const fs::path dir = ensure_out_dir(config);
  const fs::path partial = dir / "table.csv.partial";
  const fs::path final_path = dir / "table.csv";

  std::ofstream os(partial);
  etc::write_table_header(os);
  os.flush();

  // One cell at a time so an interrupted run leaves a usable .partial file.
  for (std::size_t c = 0; c < config.generators.size(); ++c) {
    etc::BatchSpec spec = config.batch_spec();
    spec.generators = {config.generators[c]};
    const auto cells = etc::run_table(spec, args.jobs == 1 ? 1 : args.jobs);
    etc::write_table_row(os, cells.front());
    os.flush();
    std::cout << "[" << (c + 1) << "/" << config.generators.size() << "] "
              << etc::generator_label(config.generators[c]);
    if (cells.front().ok()) {
      std::cout << " mean=" << cells.front().stats.mean << " cv=" << cells.front().stats.cv;
    } else {
      std::cout << " error: " << cells.front().error;
    }
    std::cout << std::endl;
  }
  os.close();
  fs::rename(partial, final_path);
  std::cout << "wrote " << final_path.string() << std::endl;
  return 0;
}

int cmd_check(const CommonArgs& args) {
  const etc::RunConfig config = load(args);
  if (!config.kappa) {
    throw etc::ConfigError("config: check requires a linear plant with a decay rate");
  }
  etc::CheckOptions options;
  options.seed = config.check.seed;
  options.prop1_samples = config.check.prop1_samples;
  options.prop1_eta_samples = config.check.prop1_eta_samples;
  options.remark1_samples = config.check.remark1_samples;

  const auto results = etc::run_checks(config.model, *config.kappa, config.sim, options);
  bool ok = true;
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& r : results) {
    std::cout << (r.passed ? "PASS" : "FAIL") << " " << r.name << " (margin " << r.margin
              << ")";
    if (!r.detail.empty()) std::cout << " " << r.detail;
    std::cout << "\n";
    if (!r.passed) {
      ok = false;
      failures.push_back({{"check", r.name}, {"margin", r.margin}, {"witness", r.detail},
                          {"seed", options.seed}});
    }
  }
  if (!ok) {
    const fs::path dir = ensure_out_dir(config);
    std::ofstream os(dir / "check_failures.json");
    os << failures.dump(2) << "\n";
    std::cout << "failing inputs written to " << (dir / "check_failures.json").string() << "\n";
    return 1;
  }
  return 0;
}

int cmd_figure(const CommonArgs& args) {
  const etc::RunConfig config = load(args);
  if (config.generators.empty()) {
    throw etc::ConfigError("config: missing 'generators' section");
  }
  if (config.initial_conditions.empty()) {
    throw etc::ConfigError("config: missing 'initial' section");
  }
  const fs::path dir = ensure_out_dir(config);
  const auto series = etc::figure_series(config.model, config.generators,
                                         config.initial_conditions.front(), config.sim);
  for (const auto& [gen, traj] : series) {
    const fs::path path = dir / ("figure_" + etc::generator_label(gen) + ".csv");
    std::ofstream os(path);
    etc::write_trajectory_csv(os, traj);
    std::cout << "wrote " << path.string() << " (" << traj.execution_times.size()
              << " executions)" << std::endl;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered control simulation benchmark"};
  app.require_subcommand(1);

  CommonArgs sim_args, table_args, check_args, figure_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run one simulation, write CSVs");
  CLI::App* table_cmd = app.add_subcommand("table", "run the batch grid, write the stats table");
  CLI::App* check_cmd = app.add_subcommand("check", "run the numerical invariant suite");
  CLI::App* figure_cmd = app.add_subcommand("figure", "export V/W series per generator");
  add_common(sim_cmd, sim_args);
  add_common(table_cmd, table_args);
  add_common(check_cmd, check_args);
  add_common(figure_cmd, figure_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim_args);
    if (table_cmd->parsed()) return cmd_table(table_args);
    if (check_cmd->parsed()) return cmd_check(check_args);
    if (figure_cmd->parsed()) return cmd_figure(figure_args);
  } catch (const etc::ConfigError& ex) {
    std::cerr << ex.what() << "\n";
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
  return 2;
}
