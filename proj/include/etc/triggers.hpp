#pragma once

#include <optional>
#include <variant>

#include "etc/kinf.hpp"
#include "etc/types.hpp"

namespace etc {

struct LinearPlant;
struct NonlinearProblem;

/// Static rule: fire when sigma*a(x) - g(x, e(t-)) <= 0, where a and g are
/// the plant-side trigger ingredients (x'Qx and 2x'PBKe in the linear case,
/// alpha(||x||) and gamma(||e||) otherwise).
struct StaticGenerator {
  double sigma;  // in (0, 1)
};

/// Dynamic rule: internal variable eta with
///   deta/dt = -damping(eta) + sigma*a(x) - g(x, e),  eta(0) = 0,
/// firing when eta + theta*(sigma*a(x) - g(x, e(t-))) <= 0.
/// damping is lambda*eta in the linear case or a K-infinity beta otherwise.
struct DynamicGenerator {
  double sigma;       // in (0, 1)
  double theta;       // >= 0
  std::optional<double> lambda;        // linear case, beta(eta) = lambda*eta
  std::optional<KInfFunction> beta;    // nonlinear case

  /// beta(eta); eta is clamped at 0 so RK4 stage values slightly below zero
  /// stay evaluable.
  double damping(double eta) const;
};

using Generator = std::variant<StaticGenerator, DynamicGenerator>;

/// Validates parameter ranges. Throws std::invalid_argument on violation.
void validate_generator(const Generator& gen);

double generator_sigma(const Generator& gen);
bool is_dynamic(const Generator& gen);

/// Per-simulation mutable state: the internal variable and the held sample.
struct GeneratorState {
  double eta = 0.0;       // >= 0 along trajectories
  Vec sampled_state;      // x(t_i)
  double last_execution_time = 0.0;
};

/// e(t) = x(t_i) - x(t).
Vec error_vector(const GeneratorState& state, const Vec& x);

/// sigma*x'Qx - 2*x'PBK*e; an event fires when this value <= 0.
double static_trigger_value_linear(const LinearPlant& plant, double sigma,
                                   const Vec& x, const Vec& e);

/// sigma*alpha(||x||) - gamma(||e||).
double static_trigger_value_nonlinear(const NonlinearProblem& problem,
                                      const StaticGenerator& gen,
                                      const Vec& x, const Vec& e);

/// -damping(eta) + static_value. The static trigger expression is exactly the
/// non-damping part of deta/dt; callers evaluate it once and share it.
double eta_derivative(const DynamicGenerator& gen, double eta, double static_value);

/// eta + theta*static_value; an event fires when this value <= 0.
double dynamic_trigger_value(const DynamicGenerator& gen, double eta, double static_value);

/// Sampling semantics at an execution instant: resample the state, keep eta
/// (the eta dynamics has no reset). Throws on non-increasing time.
void on_execution(GeneratorState& state, const Vec& x, double t);

}  // namespace etc
