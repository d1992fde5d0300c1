#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "etc/triggers.hpp"
#include "etc/types.hpp"

namespace etc {

/// Plant-side quantities the event generators consume. The static trigger
/// expression is sigma*state_gain(x) - error_gain(x, e).
struct LoopModel {
  int dim = 0;
  std::function<Vec(const Vec& x, const Vec& e)> field;      // dx/dt
  std::function<double(const Vec& x)> lyapunov;              // V(x)
  std::function<double(const Vec& x)> state_gain;            // x'Qx or alpha(||x||)
  std::function<double(const Vec& x, const Vec& e)> error_gain;  // 2x'PBKe or gamma(||e||)
};

LoopModel loop_model(const LinearPlant& plant);
LoopModel loop_model(const NonlinearProblem& problem);

struct SimConfig {
  double dt = 1e-4;          // base step, s
  double horizon = 10.0;     // s
  double event_tol = 1e-10;  // event-time localization tolerance, s
  long max_events = 10'000'000;
  int record_stride = 10;    // store every k-th step
  // Test hook: multiplies the trigger value used by the event logic. Fault
  // injection only; leave at +1 for real runs.
  double trigger_sign = 1.0;

  void validate() const;
};

enum class SimStatus { Completed, FiniteTimeStabilized, MaxEventsExceeded };

const char* to_string(SimStatus status);

/// Dense record of one closed-loop run plus the execution-time sequence.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<double> etas;
  std::vector<double> V_values;
  std::vector<double> W_values;
  std::vector<double> trigger_values;
  std::vector<double> execution_times;  // strictly increasing, first element 0
  SimStatus status = SimStatus::Completed;
};

struct NumericalBlowupError : std::runtime_error {
  explicit NumericalBlowupError(double t, const std::string& what)
      : std::runtime_error(what), last_valid_time(t) {}
  double last_valid_time;
};

/// One classical 4th-order Runge-Kutta step for an autonomous field.
Vec rk4_step(const std::function<Vec(const Vec&)>& field, const Vec& y, double dt);

/// Bisection on [t_lo, t_hi] with trigger(t_lo) > 0 and trigger(t_hi) <= 0.
/// Returns the left endpoint of the final bracket (trigger still positive
/// there), within event_tol of the crossing. Throws std::logic_error if the
/// precondition fails.
double locate_event(const std::function<double(double)>& trigger,
                    double t_lo, double t_hi, double event_tol);

/// Fixed-step simulation of the augmented system (x, eta) with zero-order
/// hold between executions; events are bracketed by per-step sign changes and
/// localized by bisection with re-integration from the step start.
Trajectory simulate(const LoopModel& model, const Generator& gen, const Vec& x0,
                    const SimConfig& config);

struct FirstEventResult {
  double time = 0.0;
  bool fired = false;  // false: horizon reached with no event
};

/// Time of the first event from a fresh sample at (x0, eta0) with e = 0.
FirstEventResult first_execution_time(const LoopModel& model, const Generator& gen,
                                      const Vec& x0, double eta0, const SimConfig& config);

struct PerformanceBound {
  double max_relative_violation = 0.0;  // max (V - V0*exp((sigma-1)*kappa*t)) / V0
  double max_v_minus_w = 0.0;           // max (V - W) / V0, should be <= 0
};

/// Checks V(t) <= V(0)*exp((sigma-1)*kappa*t) and V <= W over the recorded
/// samples. Meaningful when the run used lambda = (1-sigma)*kappa; advisory
/// otherwise.
PerformanceBound performance_bound_check(const Trajectory& traj, double sigma, double kappa);

}  // namespace etc
