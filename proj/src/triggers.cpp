#include "etc/triggers.hpp"

#include <algorithm>
#include <stdexcept>

#include "etc/nonlinear.hpp"
#include "etc/plant.hpp"

namespace etc {

double DynamicGenerator::damping(double eta) const {
  if (lambda) return *lambda * eta;
  return (*beta)(std::max(eta, 0.0));
}

void validate_generator(const Generator& gen) {
  const double sigma = generator_sigma(gen);
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("generator: sigma must be in (0, 1)");
  }
  if (const auto* dyn = std::get_if<DynamicGenerator>(&gen)) {
    if (!(dyn->theta >= 0.0)) throw std::invalid_argument("generator: theta must be >= 0");
    if (dyn->lambda && !(*dyn->lambda > 0.0)) {
      throw std::invalid_argument("generator: lambda must be positive");
    }
    if (!dyn->lambda && !dyn->beta) {
      throw std::invalid_argument("generator: dynamic rule needs lambda or beta");
    }
  }
}

double generator_sigma(const Generator& gen) {
  return std::visit([](const auto& g) { return g.sigma; }, gen);
}

bool is_dynamic(const Generator& gen) {
  return std::holds_alternative<DynamicGenerator>(gen);
}

Vec error_vector(const GeneratorState& state, const Vec& x) {
  return state.sampled_state - x;
}

double static_trigger_value_linear(const LinearPlant& plant, double sigma,
                                   const Vec& x, const Vec& e) {
  return sigma * x.dot(plant.Q * x) - 2.0 * x.dot(plant.PBK * e);
}

double static_trigger_value_nonlinear(const NonlinearProblem& problem,
                                      const StaticGenerator& gen,
                                      const Vec& x, const Vec& e) {
  return gen.sigma * problem.alpha(x.norm()) - problem.gamma(e.norm());
}

double eta_derivative(const DynamicGenerator& gen, double eta, double static_value) {
  return -gen.damping(eta) + static_value;
}

double dynamic_trigger_value(const DynamicGenerator& gen, double eta, double static_value) {
  return eta + gen.theta * static_value;
}

void on_execution(GeneratorState& state, const Vec& x, double t) {
  if (!(t > state.last_execution_time)) {
    throw std::logic_error("on_execution: execution times must be strictly increasing");
  }
  state.sampled_state = x;
  state.last_execution_time = t;
}

}  // namespace etc
