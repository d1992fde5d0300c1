#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "etc/nonlinear.hpp"
#include "etc/plant.hpp"
#include "test_support.hpp"

using namespace etc;
using etc::testing::paper_plant;
using etc::testing::vec2;

namespace {

// Independent oracle: smallest eigenvalue of the symmetric 2x2 matrix M.
double min_eig_2x2(const Mat& M) {
  const double tr = M(0, 0) + M(1, 1);
  const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
  return 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
}

// Brute-force bisection on kappa -> min-eig(Q - kappa*P).
double kappa_bisection_oracle(const Mat& P, const Mat& Q) {
  double lo = 0.0, hi = 10.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (min_eig_2x2(Q - mid * P) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

TEST_CASE("closed-loop field on the example plant") {
  const LinearPlant plant = paper_plant();
  const Vec zero = Vec::Zero(2);
  CHECK(closed_loop_field_linear(plant, vec2(1, 0), zero).isApprox(vec2(0, -1), 1e-14));
  CHECK(closed_loop_field_linear(plant, zero, zero).norm() == 0.0);
  CHECK(closed_loop_field_linear(plant, zero, vec2(1, 0)).isApprox(vec2(0, 1), 1e-14));
  CHECK_THROWS_AS(closed_loop_field_linear(plant, Vec::Zero(3), zero), std::invalid_argument);
}

TEST_CASE("Lyapunov value") {
  const LinearPlant plant = paper_plant();
  CHECK(lyapunov_value(plant, vec2(10, 0)) == doctest::Approx(100.0));
  CHECK(lyapunov_value(plant, Vec::Zero(2)) == 0.0);
  CHECK(lyapunov_value(plant, vec2(1, 1)) == doctest::Approx(2.5));
  CHECK_THROWS_AS(lyapunov_value(plant, Vec::Zero(1)), std::invalid_argument);
}

TEST_CASE("decay rate against the bisection oracle") {
  const LinearPlant plant = paper_plant(std::nullopt);
  const double oracle = kappa_bisection_oracle(plant.P, plant.Q);
  const double kappa = decay_rate_kappa(plant.P, plant.Q);
  CHECK(kappa == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(kappa == doctest::Approx(0.4836).epsilon(1e-3));

  // Q - kappa*P sits on the positive-semidefinite boundary.
  CHECK(min_eig_2x2(plant.Q - kappa * plant.P) >= -1e-9);
  CHECK(min_eig_2x2(plant.Q - kappa * plant.P) <= 1e-6);
  CHECK(min_eig_2x2(plant.Q - (kappa + 0.01) * plant.P) < 0.0);

  Mat P = Mat::Identity(3, 3);
  P(0, 1) = P(1, 0) = 0.2;
  CHECK(decay_rate_kappa(P, 3.0 * P) == doctest::Approx(3.0));
}

TEST_CASE("decay rate input validation") {
  Mat P(2, 2), Q(2, 2);
  P << 1, 0, 0, -1;  // indefinite
  Q << 1, 0, 0, 1;
  CHECK_THROWS_AS(decay_rate_kappa(P, Q), std::invalid_argument);
  P << 1, 0.5, 0.4, 1;  // asymmetric
  CHECK_THROWS_AS(decay_rate_kappa(P, Q), std::invalid_argument);
}

TEST_CASE("plant validation") {
  CHECK_NOTHROW(paper_plant());

  // The example P, Q satisfy the Lyapunov equation exactly.
  const LinearPlant plant = paper_plant();
  const Mat Acl = plant.A + plant.B * plant.K;
  CHECK((Acl.transpose() * plant.P + plant.P * Acl + plant.Q).cwiseAbs().maxCoeff() < 1e-14);

  // A perturbed Q breaks the residual bound.
  Mat Qbad = plant.Q;
  Qbad(0, 0) += 1e-6;
  CHECK_THROWS_AS(make_linear_plant(plant.A, plant.B, plant.K, plant.P, Qbad),
                  std::invalid_argument);

  // kappa = 0.48 rounds the computed value within 1%, so no warning.
  CHECK(paper_plant(0.48).warnings.empty());
  CHECK_FALSE(paper_plant(0.4).warnings.empty());
  CHECK_THROWS_AS(paper_plant(0.6), std::invalid_argument);  // Q - 0.6 P is indefinite
}

TEST_CASE("grad V dot f") {
  const LinearPlant plant = paper_plant();
  const auto problem = wrap_linear(plant, KInfFunction::power(0.48 * 0.75, 2.0),
                                   KInfFunction::power(10.0, 2.0));
  CHECK(grad_v_dot_field(problem, vec2(1, 0), Vec::Zero(2)) == doctest::Approx(-0.5).epsilon(1e-6));
  CHECK(grad_v_dot_field(problem, Vec::Zero(2), Vec::Zero(2)) == doctest::Approx(0.0));

  const auto scalar = scalar_linear_problem(KInfFunction::power(2.0, 2.0), KInfFunction::linear(1.0));
  Vec x(1), e(1);
  x << 2.0;
  e << 0.0;
  CHECK(grad_v_dot_field(scalar, x, e) == doctest::Approx(-8.0).epsilon(1e-6));
}

TEST_CASE("grad V dot f matches the analytic linear expression") {
  const LinearPlant plant = paper_plant();
  const auto problem = wrap_linear(plant, KInfFunction::linear(1.0), KInfFunction::linear(1.0));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  for (int i = 0; i < 100; ++i) {
    const Vec x = vec2(coord(rng), coord(rng));
    const Vec e = vec2(coord(rng), coord(rng));
    const double analytic = -x.dot(plant.Q * x) + 2.0 * x.dot(plant.PBK * e);
    const double numeric = grad_v_dot_field(problem, x, e);
    CHECK(numeric == doctest::Approx(analytic).epsilon(1e-6));
  }
}

TEST_CASE("nonlinear validation on the scalar cubic demo") {
  const auto problem = scalar_cubic_problem(KInfFunction::power(2.0, 4.0), KInfFunction::linear(1.0));
  std::vector<Vec> states, errors;
  for (double v : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    Vec x(1);
    x << v;
    states.push_back(x);
  }
  Vec e0(1);
  e0 << 0.0;
  errors.push_back(e0);
  const auto report = validate_nonlinear(problem, states, errors);
  CHECK(report.passed);
  CHECK(report.lipschitz_assumed);
}
