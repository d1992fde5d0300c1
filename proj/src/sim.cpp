#include "etc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "etc/nonlinear.hpp"
#include "etc/plant.hpp"

namespace etc {

LoopModel loop_model(const LinearPlant& plant) {
  LoopModel m;
  m.dim = plant.dim();
  m.field = [plant](const Vec& x, const Vec& e) { return closed_loop_field_linear(plant, x, e); };
  m.lyapunov = [plant](const Vec& x) { return lyapunov_value(plant, x); };
  m.state_gain = [plant](const Vec& x) { return x.dot(plant.Q * x); };
  m.error_gain = [plant](const Vec& x, const Vec& e) { return 2.0 * x.dot(plant.PBK * e); };
  return m;
}

LoopModel loop_model(const NonlinearProblem& problem) {
  LoopModel m;
  m.dim = problem.state_dim;
  m.field = [problem](const Vec& x, const Vec& e) {
    return problem.field(x, problem.feedback(x + e));
  };
  m.lyapunov = problem.lyapunov;
  m.state_gain = [problem](const Vec& x) { return problem.alpha(x.norm()); };
  m.error_gain = [problem](const Vec& x, const Vec& e) {
    (void)x;
    return problem.gamma(e.norm());
  };
  return m;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
  if (!(horizon > dt)) throw std::invalid_argument("sim: horizon must exceed dt");
  if (!(event_tol > 0.0 && event_tol < dt)) {
    throw std::invalid_argument("sim: event_tol must be in (0, dt)");
  }
  if (max_events < 1) throw std::invalid_argument("sim: max_events must be >= 1");
  if (record_stride < 1) throw std::invalid_argument("sim: record_stride must be >= 1");
}

const char* to_string(SimStatus status) {
  switch (status) {
    case SimStatus::Completed: return "completed";
    case SimStatus::FiniteTimeStabilized: return "finite-time-stabilized";
    case SimStatus::MaxEventsExceeded: return "max-events-exceeded";
  }
  return "unknown";
}

Vec rk4_step(const std::function<Vec(const Vec&)>& field, const Vec& y, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be positive");
  const Vec k1 = field(y);
  const Vec k2 = field(y + (0.5 * dt) * k1);
  const Vec k3 = field(y + (0.5 * dt) * k2);
  const Vec k4 = field(y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double locate_event(const std::function<double(double)>& trigger,
                    double t_lo, double t_hi, double event_tol) {
  if (!(trigger(t_lo) > 0.0) || !(trigger(t_hi) <= 0.0)) {
    throw std::logic_error("locate_event: no sign change in bracket");
  }
  while (t_hi - t_lo > event_tol) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (trigger(mid) > 0.0) {
      t_lo = mid;
    } else {
      t_hi = mid;
    }
  }
  return t_lo;
}

namespace {

// Integrates the augmented vector [x; eta] under a frozen sample, so the
// error e = x(t_i) - x inside every RK4 stage is stage-consistent.
struct Stepper {
  const LoopModel& model;
  double sigma;
  const DynamicGenerator* dyn;  // null for the static rule
  Vec sampled;

  double static_value(const Vec& x) const {
    return sigma * model.state_gain(x) - model.error_gain(x, sampled - x);
  }

  double trigger(const Vec& y) const {
    const Vec x = y.head(model.dim);
    const double s = static_value(x);
    return dyn ? dynamic_trigger_value(*dyn, y[model.dim], s) : s;
  }

  Vec deriv(const Vec& y) const {
    const int n = model.dim;
    const Vec x = y.head(n);
    const Vec e = sampled - x;
    Vec dy(n + 1);
    dy.head(n) = model.field(x, e);
    if (dyn) {
      const double s = sigma * model.state_gain(x) - model.error_gain(x, e);
      dy[n] = eta_derivative(*dyn, y[n], s);
    } else {
      dy[n] = 0.0;
    }
    return dy;
  }

  Vec step(const Vec& y, double h) const {
    return rk4_step([this](const Vec& yy) { return deriv(yy); }, y, h);
  }
};

Stepper make_stepper(const LoopModel& model, const Generator& gen, const Vec& x0) {
  return Stepper{model, generator_sigma(gen), std::get_if<DynamicGenerator>(&gen), x0};
}

// Localizes the event inside (t, t+h] given a sign change across the step.
// The returned offset keeps the trigger positive (left bracket endpoint) and
// is clamped below by event_tol so execution times stay strictly increasing.
double locate_in_step(const Stepper& stepper, const Vec& y, double h,
                      double event_tol, double sign) {
  const double tau = locate_event(
      [&](double s) { return s == 0.0 ? sign * stepper.trigger(y)
                                      : sign * stepper.trigger(stepper.step(y, s)); },
      0.0, h, event_tol);
  return std::min(h, std::max(tau, event_tol));
}

void check_finite(const Vec& y, double t) {
  if (!y.allFinite()) {
    std::ostringstream os;
    os << "numerical blowup; last valid time " << t;
    throw NumericalBlowupError(t, os.str());
  }
}

}  // namespace

Trajectory simulate(const LoopModel& model, const Generator& gen, const Vec& x0,
                    const SimConfig& config) {
  config.validate();
  validate_generator(gen);
  if (!x0.allFinite()) throw std::invalid_argument("simulate: x0 must be finite");
  if (x0.size() != model.dim) throw std::invalid_argument("simulate: x0 dimension mismatch");

  const int n = model.dim;
  const double x0_norm = x0.norm();
  const double stabilized_norm = 1e-9 * x0_norm;

  Trajectory traj;
  Stepper stepper = make_stepper(model, gen, x0);

  Vec y(n + 1);
  y.head(n) = x0;
  y[n] = 0.0;  // eta(0) = 0
  double t = 0.0;

  auto record = [&](double time, const Vec& yy) {
    const Vec x = yy.head(n);
    const double eta = yy[n];
    const double v = model.lyapunov(x);
    traj.times.push_back(time);
    traj.states.push_back(x);
    traj.etas.push_back(eta);
    traj.V_values.push_back(v);
    traj.W_values.push_back(v + eta);
    traj.trigger_values.push_back(stepper.trigger(yy));
  };

  // t_0 = 0: sample the initial state.
  traj.execution_times.push_back(0.0);
  if (x0_norm == 0.0) {
    traj.status = SimStatus::FiniteTimeStabilized;
    record(0.0, y);
    return traj;
  }
  record(0.0, y);

  const double sign = config.trigger_sign;
  double prev_trigger = sign * stepper.trigger(y);
  long events = 0;
  long steps_since_record = 0;
  bool recorded_last = true;

  while (t < config.horizon - 0.5 * config.event_tol) {
    const double h = std::min(config.dt, config.horizon - t);
    const Vec y_new = stepper.step(y, h);
    check_finite(y_new, t);
    const double trig_new = sign * stepper.trigger(y_new);

    if (prev_trigger > 0.0 && trig_new <= 0.0) {
      const double tau = locate_in_step(stepper, y, h, config.event_tol, sign);
      const Vec y_event = stepper.step(y, tau);
      check_finite(y_event, t);
      const double t_event = t + tau;

      record(t_event, y_event);  // left side: e still relative to the old sample
      if (++events > config.max_events) {
        traj.status = SimStatus::MaxEventsExceeded;
        return traj;
      }
      const Vec x_event = y_event.head(n);
      stepper.sampled = x_event;
      traj.execution_times.push_back(t_event);
      record(t_event, y_event);  // right side: e = 0
      recorded_last = true;
      steps_since_record = 0;

      if (x_event.norm() < stabilized_norm) {
        traj.status = SimStatus::FiniteTimeStabilized;
        return traj;
      }
      t = t_event;
      y = y_event;
      prev_trigger = sign * stepper.trigger(y);
      continue;
    }

    t += h;
    y = y_new;
    prev_trigger = trig_new;
    recorded_last = false;
    if (++steps_since_record >= config.record_stride) {
      record(t, y);
      steps_since_record = 0;
      recorded_last = true;
    }
  }
  if (!recorded_last) record(t, y);
  traj.status = SimStatus::Completed;
  return traj;
}

FirstEventResult first_execution_time(const LoopModel& model, const Generator& gen,
                                      const Vec& x0, double eta0, const SimConfig& config) {
  config.validate();
  validate_generator(gen);
  if (x0.norm() == 0.0) throw std::invalid_argument("first_execution_time: x0 must be nonzero");
  if (!(eta0 >= 0.0)) throw std::invalid_argument("first_execution_time: eta0 must be >= 0");

  const int n = model.dim;
  Stepper stepper = make_stepper(model, gen, x0);
  Vec y(n + 1);
  y.head(n) = x0;
  y[n] = eta0;
  double t = 0.0;

  const double sign = config.trigger_sign;
  double prev_trigger = sign * stepper.trigger(y);

  while (t < config.horizon - 0.5 * config.event_tol) {
    const double h = std::min(config.dt, config.horizon - t);
    const Vec y_new = stepper.step(y, h);
    check_finite(y_new, t);
    const double trig_new = sign * stepper.trigger(y_new);
    if (prev_trigger > 0.0 && trig_new <= 0.0) {
      const double tau = locate_in_step(stepper, y, h, config.event_tol, sign);
      return FirstEventResult{t + tau, true};
    }
    t += h;
    y = y_new;
    prev_trigger = trig_new;
  }
  return FirstEventResult{config.horizon, false};
}

PerformanceBound performance_bound_check(const Trajectory& traj, double sigma, double kappa) {
  PerformanceBound result;
  if (traj.times.empty()) return result;
  const double v0 = traj.V_values.front();
  if (!(v0 > 0.0)) return result;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double bound = v0 * std::exp((sigma - 1.0) * kappa * traj.times[i]);
    result.max_relative_violation =
        std::max(result.max_relative_violation, (traj.V_values[i] - bound) / v0);
    result.max_v_minus_w =
        std::max(result.max_v_minus_w, (traj.V_values[i] - traj.W_values[i]) / v0);
  }
  return result;
}

}  // namespace etc
