#include "etc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace etc {

InvariantSummary summarize_invariants(const Trajectory& traj, double sigma,
                                      std::optional<double> kappa) {
  (void)sigma;
  InvariantSummary s;
  if (traj.etas.empty()) return s;
  s.min_eta = *std::min_element(traj.etas.begin(), traj.etas.end());
  s.max_eta = *std::max_element(traj.etas.begin(), traj.etas.end());
  s.min_trigger = *std::min_element(traj.trigger_values.begin(), traj.trigger_values.end());
  s.w0 = traj.W_values.front();
  s.samples = static_cast<long>(traj.times.size());
  for (std::size_t i = 1; i < traj.W_values.size(); ++i) {
    s.max_w_step_increase =
        std::max(s.max_w_step_increase, traj.W_values[i] - traj.W_values[i - 1]);
  }
  if (kappa) {
    const PerformanceBound bound = performance_bound_check(traj, sigma, *kappa);
    s.perf_violation = bound.max_relative_violation;
    s.max_v_minus_w = bound.max_v_minus_w;
  }
  return s;
}

InvariantSummary merge_worst(const InvariantSummary& a, const InvariantSummary& b) {
  if (a.samples == 0) return b;
  if (b.samples == 0) return a;
  InvariantSummary s;
  s.min_eta = std::min(a.min_eta, b.min_eta);
  s.max_eta = std::max(a.max_eta, b.max_eta);
  s.min_trigger = std::min(a.min_trigger, b.min_trigger);
  s.max_w_step_increase = std::max(a.max_w_step_increase, b.max_w_step_increase);
  s.w0 = std::max(a.w0, b.w0);
  s.samples = std::min(a.samples, b.samples);
  s.perf_violation = std::max(a.perf_violation, b.perf_violation);
  s.max_v_minus_w = std::max(a.max_v_minus_w, b.max_v_minus_w);
  return s;
}

std::vector<Vec> circle_initial_conditions(double radius, int count) {
  if (count < 1) throw std::invalid_argument("circle_initial_conditions: count must be >= 1");
  if (!(radius > 0.0)) throw std::invalid_argument("circle_initial_conditions: radius must be positive");
  std::vector<Vec> states;
  states.reserve(count);
  for (int i = 1; i <= count; ++i) {
    const double angle = 2.0 * M_PI * i / count;
    Vec x(2);
    x << radius * std::cos(angle), radius * std::sin(angle);
    states.push_back(x);
  }
  return states;
}

RunStats inter_execution_stats(const std::vector<std::vector<double>>& execution_times) {
  std::vector<double> intervals;
  for (const auto& times : execution_times) {
    if (times.size() < 2) {
      throw std::invalid_argument("inter_execution_stats: run has fewer than 2 execution times");
    }
    for (std::size_t i = 1; i < times.size(); ++i) {
      intervals.push_back(times[i] - times[i - 1]);
    }
  }
  if (intervals.empty()) throw std::invalid_argument("inter_execution_stats: empty pool");

  RunStats stats;
  stats.count = static_cast<long>(intervals.size());
  double sum = 0.0;
  stats.min = std::numeric_limits<double>::infinity();
  for (double dt : intervals) {
    sum += dt;
    stats.min = std::min(stats.min, dt);
  }
  stats.mean = sum / stats.count;
  double sq = 0.0;
  for (double dt : intervals) {
    const double d = dt - stats.mean;
    sq += d * d;
  }
  stats.sd = std::sqrt(sq / stats.count);
  stats.cv = stats.mean > 0.0 ? stats.sd / stats.mean : 0.0;
  return stats;
}

namespace {

struct RunOutput {
  std::vector<double> execution_times;
  InvariantSummary invariants;
  std::string error;
};

RunOutput run_one(const BatchSpec& spec, const Generator& gen, const Vec& x0) {
  RunOutput out;
  try {
    const Trajectory traj = simulate(spec.model, gen, x0, spec.sim);
    out.execution_times = traj.execution_times;
    std::optional<double> kappa;
    if (spec.kappa && is_dynamic(gen)) {
      const auto& dyn = std::get<DynamicGenerator>(gen);
      // The exponential bound holds when lambda = (1-sigma)*kappa.
      if (dyn.lambda && std::abs(*dyn.lambda - (1.0 - dyn.sigma) * *spec.kappa) <
                            1e-9 * (1.0 + *dyn.lambda)) {
        kappa = spec.kappa;
      }
    } else if (spec.kappa) {
      kappa = spec.kappa;  // static rule satisfies the same bound
    }
    out.invariants = summarize_invariants(traj, generator_sigma(gen), kappa);
  } catch (const std::exception& ex) {
    out.error = ex.what();
  }
  return out;
}

}  // namespace

std::vector<CellResult> run_table(const BatchSpec& spec, int jobs) {
  const long cells = static_cast<long>(spec.generators.size());
  const long ics = static_cast<long>(spec.initial_conditions.size());
  if (cells == 0 || ics == 0) throw std::invalid_argument("run_table: empty batch");
  for (const auto& gen : spec.generators) validate_generator(gen);

  std::vector<RunOutput> runs(cells * ics);
  const long total = cells * ics;

  if (jobs == 1) {
    // Serial reference path; kept for testing against the parallel fan-out.
    for (long w = 0; w < total; ++w) {
      runs[w] = run_one(spec, spec.generators[w / ics], spec.initial_conditions[w % ics]);
    }
  } else {
#ifdef _OPENMP
    if (jobs > 1) omp_set_num_threads(jobs);
#pragma omp parallel for schedule(dynamic)
#endif
    for (long w = 0; w < total; ++w) {
      runs[w] = run_one(spec, spec.generators[w / ics], spec.initial_conditions[w % ics]);
    }
  }

  // Deterministic merge in key order regardless of completion order.
  std::vector<CellResult> results;
  results.reserve(cells);
  for (long c = 0; c < cells; ++c) {
    CellResult cell;
    cell.gen = spec.generators[c];
    std::vector<std::vector<double>> exec_times;
    for (long i = 0; i < ics; ++i) {
      const RunOutput& run = runs[c * ics + i];
      if (!run.error.empty()) {
        cell.error = run.error;
        break;
      }
      exec_times.push_back(run.execution_times);
      cell.invariants = merge_worst(cell.invariants, run.invariants);
    }
    if (cell.error.empty()) {
      try {
        cell.stats = inter_execution_stats(exec_times);
      } catch (const std::exception& ex) {
        cell.error = ex.what();
      }
    }
    results.push_back(std::move(cell));
  }
  return results;
}

std::vector<std::pair<Generator, Trajectory>> figure_series(
    const LoopModel& model, const std::vector<Generator>& generators,
    const Vec& x0, const SimConfig& config) {
  std::vector<std::pair<Generator, Trajectory>> series;
  series.reserve(generators.size());
  for (const auto& gen : generators) {
    series.emplace_back(gen, simulate(model, gen, x0, config));
  }
  return series;
}

}  // namespace etc
