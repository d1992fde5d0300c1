#include "etc/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "etc/stats.hpp"

namespace etc {

namespace {

std::string vec_to_string(const Vec& x) {
  std::ostringstream os;
  os << "[";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << "]";
  return os.str();
}

std::vector<Vec> probe_states(int dim) {
  std::vector<Vec> states;
  Vec a = Vec::Zero(dim);
  a[0] = 10.0;
  states.push_back(a);
  if (dim >= 2) {
    Vec b = Vec::Zero(dim);
    b[0] = 10.0 * std::cos(1.0);
    b[1] = 10.0 * std::sin(1.0);
    states.push_back(b);
  }
  return states;
}

DynamicGenerator dynamic_gen(double sigma, double theta, double kappa) {
  DynamicGenerator dyn;
  dyn.sigma = sigma;
  dyn.theta = theta;
  dyn.lambda = (1.0 - sigma) * kappa;
  return dyn;
}

}  // namespace

std::vector<CheckResult> run_checks(const LoopModel& model, double kappa,
                                    const SimConfig& sim, const CheckOptions& options) {
  std::vector<CheckResult> results;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> coord(-10.0, 10.0);
  std::uniform_real_distribution<double> eta_dist(
      std::nextafter(0.0, 1.0), 1.0);
  const double sigmas[] = {0.001, 0.01, 0.1};
  const double tol2 = 2.0 * sim.event_tol;

  auto random_state = [&]() {
    Vec x(model.dim);
    do {
      for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = coord(rng);
    } while (x.norm() < 1e-6);
    return x;
  };

  // Lemma 1: eta and the dynamic trigger value stay nonnegative along
  // trajectories, including the extreme (sigma, theta) corner.
  {
    CheckResult check{"lemma1-eta-nonnegative"};
    check.margin = std::numeric_limits<double>::infinity();
    for (double sigma : {0.001, 0.1, 0.999}) {
      for (double theta : {0.0, 1.0, 100.0}) {
        for (const Vec& x0 : probe_states(model.dim)) {
          const Generator gen = dynamic_gen(sigma, theta, kappa);
          const Trajectory traj = simulate(model, gen, x0, sim);
          const InvariantSummary inv = summarize_invariants(traj, sigma, std::nullopt);
          const double tol = 1e-8 * (1.0 + inv.max_eta);
          const double margin =
              std::min(inv.min_eta + tol, inv.min_trigger + 1e-8);
          if (margin < check.margin) check.margin = margin;
          if (margin < 0.0 && check.passed) {
            check.passed = false;
            std::ostringstream os;
            os << "sigma=" << sigma << " theta=" << theta << " x0=" << vec_to_string(x0)
               << " min_eta=" << inv.min_eta << " min_trigger=" << inv.min_trigger;
            check.detail = os.str();
          }
        }
      }
    }
    results.push_back(check);
  }

  // Proposition 1: the static rule never fires later than the dynamic rule
  // from the same (x0, eta0).
  {
    CheckResult check{"prop1-static-before-dynamic"};
    check.margin = std::numeric_limits<double>::infinity();
    const double thetas[] = {0.0, 0.1, 1.0, 10.0};
    const int total = options.prop1_samples + options.prop1_eta_samples;
    for (int i = 0; i < total; ++i) {
      const Vec x0 = random_state();
      const double eta0 = i < options.prop1_samples ? 0.0 : eta_dist(rng);
      const double sigma = sigmas[i % 3];
      const double theta = thetas[i % 4];

      SimConfig static_sim = sim;
      static_sim.trigger_sign = options.static_trigger_sign;
      const FirstEventResult ts =
          first_execution_time(model, StaticGenerator{sigma}, x0, eta0, static_sim);
      const FirstEventResult td =
          first_execution_time(model, dynamic_gen(sigma, theta, kappa), x0, eta0, sim);
      const double margin = td.time + tol2 - ts.time;
      if (margin < check.margin) check.margin = margin;
      if (margin < 0.0 && check.passed) {
        check.passed = false;
        std::ostringstream os;
        os << "witness x0=" << vec_to_string(x0) << " eta0=" << eta0 << " sigma=" << sigma
           << " theta=" << theta << " t_s=" << ts.time << " t_d=" << td.time;
        check.detail = os.str();
      }
    }
    results.push_back(check);
  }

  // Remark 1: a smaller theta gives a first execution time at least as large.
  {
    CheckResult check{"remark1-theta-monotone"};
    check.margin = std::numeric_limits<double>::infinity();
    const std::pair<double, double> theta_pairs[] = {{0.0, 0.1}, {0.1, 1.0}, {1.0, 10.0}};
    for (int i = 0; i < options.remark1_samples; ++i) {
      const Vec x0 = random_state();
      const double eta0 = eta_dist(rng);
      const double sigma = sigmas[i % 3];
      for (const auto& [theta_small, theta_large] : theta_pairs) {
        const FirstEventResult t_small =
            first_execution_time(model, dynamic_gen(sigma, theta_small, kappa), x0, eta0, sim);
        const FirstEventResult t_large =
            first_execution_time(model, dynamic_gen(sigma, theta_large, kappa), x0, eta0, sim);
        const double margin = t_small.time + tol2 - t_large.time;
        if (margin < check.margin) check.margin = margin;
        if (margin < 0.0 && check.passed) {
          check.passed = false;
          std::ostringstream os;
          os << "witness x0=" << vec_to_string(x0) << " eta0=" << eta0 << " sigma=" << sigma
             << " thetas=(" << theta_small << ", " << theta_large << ") times=(" << t_small.time
             << ", " << t_large.time << ")";
          check.detail = os.str();
        }
      }
    }
    results.push_back(check);
  }

  // Performance bound V(t) <= V(0) exp((sigma-1) kappa t) with
  // lambda = (1-sigma) kappa, plus V <= W and W monotone.
  {
    CheckResult bound{"performance-bound"};
    CheckResult monotone{"w-monotone"};
    bound.margin = monotone.margin = std::numeric_limits<double>::infinity();
    for (double sigma : sigmas) {
      std::vector<Generator> gens = {StaticGenerator{sigma}, dynamic_gen(sigma, 0.0, kappa),
                                     dynamic_gen(sigma, 1.0, kappa)};
      for (const auto& gen : gens) {
        for (const Vec& x0 : probe_states(model.dim)) {
          const Trajectory traj = simulate(model, gen, x0, sim);
          const InvariantSummary inv = summarize_invariants(traj, sigma, kappa);
          const double b_margin =
              std::min(1e-6 - inv.perf_violation, 1e-8 - inv.max_v_minus_w);
          if (b_margin < bound.margin) bound.margin = b_margin;
          if (b_margin < 0.0 && bound.passed) {
            bound.passed = false;
            std::ostringstream os;
            os << "sigma=" << sigma << " x0=" << vec_to_string(x0)
               << " violation=" << inv.perf_violation << " max(V-W)/V0=" << inv.max_v_minus_w;
            bound.detail = os.str();
          }
          const double m_margin = 1e-6 * inv.w0 - inv.max_w_step_increase;
          if (m_margin < monotone.margin) monotone.margin = m_margin;
          if (m_margin < 0.0 && monotone.passed) {
            monotone.passed = false;
            std::ostringstream os;
            os << "sigma=" << sigma << " x0=" << vec_to_string(x0)
               << " max W rise=" << inv.max_w_step_increase << " W0=" << inv.w0;
            monotone.detail = os.str();
          }
        }
      }
    }
    results.push_back(bound);
    results.push_back(monotone);
  }

  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

}  // namespace etc
