#include "etc/nonlinear.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace etc {

NonlinearProblem wrap_linear(const LinearPlant& plant,
                             const KInfFunction& alpha, const KInfFunction& gamma) {
  NonlinearProblem p;
  p.name = "linear";
  p.state_dim = plant.dim();
  p.input_dim = static_cast<int>(plant.B.cols());
  p.field = [plant](const Vec& x, const Vec& u) -> Vec { return plant.A * x + plant.B * u; };
  p.feedback = [plant](const Vec& x) -> Vec { return plant.K * x; };
  p.lyapunov = [plant](const Vec& x) { return x.dot(plant.P * x); };
  p.alpha = alpha;
  p.gamma = gamma;
  return p;
}

NonlinearProblem scalar_cubic_problem(const KInfFunction& alpha, const KInfFunction& gamma) {
  NonlinearProblem p;
  p.name = "scalar_cubic";
  p.state_dim = 1;
  p.input_dim = 1;
  p.field = [](const Vec& x, const Vec& u) -> Vec {
    Vec dx(1);
    dx[0] = -x[0] * x[0] * x[0] + u[0];
    return dx;
  };
  p.feedback = [](const Vec&) -> Vec { return Vec::Zero(1); };
  p.lyapunov = [](const Vec& x) { return x[0] * x[0]; };
  p.alpha = alpha;
  p.gamma = gamma;
  return p;
}

NonlinearProblem scalar_linear_problem(const KInfFunction& alpha, const KInfFunction& gamma) {
  NonlinearProblem p;
  p.name = "scalar_linear";
  p.state_dim = 1;
  p.input_dim = 1;
  p.field = [](const Vec& x, const Vec& u) -> Vec {
    Vec dx(1);
    dx[0] = -x[0] + u[0];
    return dx;
  };
  p.feedback = [](const Vec&) -> Vec { return Vec::Zero(1); };
  p.lyapunov = [](const Vec& x) { return x[0] * x[0]; };
  p.alpha = alpha;
  p.gamma = gamma;
  return p;
}

double grad_v_dot_field(const NonlinearProblem& problem, const Vec& x, const Vec& e, double h) {
  if (x.size() != problem.state_dim || e.size() != problem.state_dim) {
    throw std::invalid_argument("grad_v_dot_field: dimension mismatch");
  }
  if (h == 0.0) h = 1e-6 * (1.0 + x.norm());
  if (!(h > 0.0)) throw std::invalid_argument("grad_v_dot_field: h must be positive");

  Vec grad(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    grad[i] = (problem.lyapunov(xp) - problem.lyapunov(xm)) / (2.0 * h);
  }
  const Vec u = problem.feedback(x + e);
  return grad.dot(problem.field(x, u));
}

NonlinearValidation validate_nonlinear(const NonlinearProblem& problem,
                                       const std::vector<Vec>& states,
                                       const std::vector<Vec>& errors,
                                       double tol) {
  NonlinearValidation report;
  auto fail = [&](const std::string& msg) {
    report.passed = false;
    report.violations.push_back(msg);
  };

  if (problem.lyapunov(Vec::Zero(problem.state_dim)) != 0.0) fail("V(0) != 0");
  for (const Vec& x : states) {
    if (x.norm() > 0.0 && !(problem.lyapunov(x) > 0.0)) {
      std::ostringstream os;
      os << "V not positive at x = [" << x.transpose() << "]";
      fail(os.str());
    }
    for (const Vec& e : errors) {
      const double lhs = grad_v_dot_field(problem, x, e);
      const double rhs = -problem.alpha(x.norm()) + problem.gamma(e.norm());
      if (lhs > rhs + tol) {
        std::ostringstream os;
        os << "ISS dissipation violated at x = [" << x.transpose() << "], e = ["
           << e.transpose() << "]: " << lhs << " > " << rhs;
        fail(os.str());
      }
    }
  }
  return report;
}

}  // namespace etc
