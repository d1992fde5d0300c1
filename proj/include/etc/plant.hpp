#pragma once

#include <optional>
#include <string>
#include <vector>

#include "etc/types.hpp"

namespace etc {

/// Linear closed loop dx/dt = Ax + BK(x+e) with Lyapunov data V(x) = x'Px,
/// (A+BK)'P + P(A+BK) = -Q and decay rate kappa, the largest scalar with
/// Q - kappa*P positive semidefinite. Immutable after validation.
struct LinearPlant {
  Mat A, B, K, P, Q;
  Mat PBK;       // P*B*K, cached for the trigger expressions
  double kappa;  // 1/time
  std::vector<std::string> warnings;

  int dim() const { return static_cast<int>(A.rows()); }
};

/// Largest kappa with Q - kappa*P >= 0, i.e. the smallest generalized
/// eigenvalue of the pencil (Q, P). Inputs must be symmetric positive
/// definite; throws std::invalid_argument otherwise.
double decay_rate_kappa(const Mat& P, const Mat& Q);

/// Validates the matrices (symmetry, positive definiteness, Lyapunov
/// residual) and computes kappa. A configured kappa is accepted as an
/// override; a warning is recorded when it differs from the computed value
/// by more than 1%. Throws std::invalid_argument on any violation.
LinearPlant make_linear_plant(const Mat& A, const Mat& B, const Mat& K,
                              const Mat& P, const Mat& Q,
                              std::optional<double> kappa_override = std::nullopt);

/// A*x + B*K*(x+e). Throws std::invalid_argument on dimension mismatch.
Vec closed_loop_field_linear(const LinearPlant& plant, const Vec& x, const Vec& e);

/// x'Px. Throws std::invalid_argument on dimension mismatch.
double lyapunov_value(const LinearPlant& plant, const Vec& x);

}  // namespace etc
