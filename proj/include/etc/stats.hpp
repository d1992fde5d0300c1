#pragma once

#include <optional>
#include <string>
#include <vector>

#include "etc/sim.hpp"
#include "etc/types.hpp"

namespace etc {

/// Inter-execution-time statistics pooled over a batch of runs.
struct RunStats {
  double mean = 0.0;  // s
  double sd = 0.0;    // s, population formula
  double cv = 0.0;    // sd/mean
  double min = 0.0;   // observed minimal inter-execution time, s
  long count = 0;     // pooled interval count
};

/// Per-run invariant aggregates, computed over the recorded samples.
struct InvariantSummary {
  double min_eta = 0.0;
  double max_eta = 0.0;
  double min_trigger = 0.0;           // min recorded trigger value
  double max_w_step_increase = 0.0;   // max rise between consecutive samples
  double w0 = 0.0;
  long samples = 0;
  // Filled when kappa is known and the run used lambda = (1-sigma)*kappa.
  double perf_violation = 0.0;  // max (V - V0*exp((sigma-1)*kappa*t)) / V0
  double max_v_minus_w = 0.0;   // max (V - W) / V0
};

InvariantSummary summarize_invariants(const Trajectory& traj, double sigma,
                                      std::optional<double> kappa);

/// Merge keeping the worst margins; samples is the per-run minimum.
InvariantSummary merge_worst(const InvariantSummary& a, const InvariantSummary& b);

/// x0_i = [radius*cos(2*pi*i/count), radius*sin(2*pi*i/count)], i = 1..count.
/// State dimension 2 only; explicit lists are required otherwise.
std::vector<Vec> circle_initial_conditions(double radius, int count);

/// Pools all consecutive execution-time differences across the given runs
/// (the final interval truncated by the horizon carries no difference and is
/// naturally excluded). Every run must have at least two execution times;
/// an empty pool is an error.
RunStats inter_execution_stats(const std::vector<std::vector<double>>& execution_times);

struct BatchSpec {
  LoopModel model;
  std::optional<double> kappa;  // enables performance-bound aggregation
  std::vector<Generator> generators;
  std::vector<Vec> initial_conditions;
  SimConfig sim;
};

struct CellResult {
  Generator gen;
  RunStats stats;
  InvariantSummary invariants;
  std::string error;  // non-empty when the cell failed; other cells still run

  bool ok() const { return error.empty(); }
};

/// Runs every (generator, initial condition) pair and aggregates per
/// generator. jobs <= 1 is the serial reference path; jobs > 1 (or 0 for all
/// cores) fans the independent runs out with OpenMP. Results are merged in
/// key order, so the output is identical for any job count.
std::vector<CellResult> run_table(const BatchSpec& spec, int jobs = 1);

/// Simulates each generator from x0 and returns the runs in order, for
/// plotting V and W against time.
std::vector<std::pair<Generator, Trajectory>> figure_series(
    const LoopModel& model, const std::vector<Generator>& generators,
    const Vec& x0, const SimConfig& config);

}  // namespace etc
