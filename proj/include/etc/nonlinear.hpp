#pragma once

#include <functional>
#include <string>
#include <vector>

#include "etc/kinf.hpp"
#include "etc/plant.hpp"
#include "etc/types.hpp"

namespace etc {

/// Nonlinear closed loop dx/dt = f(x, k(x+e)) with an ISS Lyapunov function V
/// and trigger ingredients alpha, gamma. Vector fields come from a small
/// built-in registry, selected by name, so configurations stay declarative.
struct NonlinearProblem {
  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  std::function<Vec(const Vec& x, const Vec& u)> field;
  std::function<Vec(const Vec& x)> feedback;
  std::function<double(const Vec& x)> lyapunov;
  KInfFunction alpha = KInfFunction::linear(1.0);
  KInfFunction gamma = KInfFunction::linear(1.0);
};

/// Wraps a linear plant: f(x,u) = Ax + Bu, k(x) = Kx, V(x) = x'Px.
NonlinearProblem wrap_linear(const LinearPlant& plant,
                             const KInfFunction& alpha, const KInfFunction& gamma);

/// Scalar demo system dx/dt = -x^3 + u with k(x) = 0 and V(x) = x^2.
NonlinearProblem scalar_cubic_problem(const KInfFunction& alpha, const KInfFunction& gamma);

/// Scalar system dx/dt = -x + u with k(x) = 0 and V(x) = x^2.
NonlinearProblem scalar_linear_problem(const KInfFunction& alpha, const KInfFunction& gamma);

/// Central-difference gradient of V at x dotted with f(x, k(x+e)).
/// Default step h = 1e-6 * (1 + ||x||). Used by validation only.
double grad_v_dot_field(const NonlinearProblem& problem, const Vec& x, const Vec& e,
                        double h = 0.0);

struct NonlinearValidation {
  bool passed = true;
  bool lipschitz_assumed = true;  // Lipschitz-on-compacts hypotheses are assumptions
  std::vector<std::string> violations;
};

/// Samples V positivity and the ISS dissipation inequality
/// grad V . f(x, k(x+e)) <= -alpha(||x||) + gamma(||e||) + tol over a grid of
/// (x, e) pairs.
NonlinearValidation validate_nonlinear(const NonlinearProblem& problem,
                                       const std::vector<Vec>& states,
                                       const std::vector<Vec>& errors,
                                       double tol = 1e-6);

}  // namespace etc
