#include "etc/plant.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace etc {

namespace {

void require_symmetric(const Mat& M, const char* name, double tol = 1e-12) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(name) + " is not square");
  }
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument(std::string(name) + " is not symmetric");
  }
}

void require_spd(const Mat& M, const char* name) {
  require_symmetric(M, name);
  Eigen::SelfAdjointEigenSolver<Mat> es(M, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument(std::string(name) + " is not positive definite");
  }
}

}  // namespace

double decay_rate_kappa(const Mat& P, const Mat& Q) {
  if (P.rows() != Q.rows() || P.cols() != Q.cols()) {
    throw std::invalid_argument("decay_rate_kappa: P and Q sizes differ");
  }
  require_spd(P, "P");
  require_spd(Q, "Q");
  // Smallest eigenvalue of the pencil Q v = kappa P v.
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Q, P, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
  return es.eigenvalues().minCoeff();
}

LinearPlant make_linear_plant(const Mat& A, const Mat& B, const Mat& K,
                              const Mat& P, const Mat& Q,
                              std::optional<double> kappa_override) {
  const auto n = A.rows();
  if (A.cols() != n) throw std::invalid_argument("A is not square");
  if (B.rows() != n) throw std::invalid_argument("B row count does not match A");
  const auto m = B.cols();
  if (K.rows() != m || K.cols() != n) throw std::invalid_argument("K must be m x n");
  if (P.rows() != n || Q.rows() != n) throw std::invalid_argument("P and Q must be n x n");

  require_spd(P, "P");
  require_spd(Q, "Q");

  const Mat Acl = A + B * K;
  const Mat residual = Acl.transpose() * P + P * Acl + Q;
  if (residual.cwiseAbs().maxCoeff() > 1e-9) {
    std::ostringstream os;
    os << "Lyapunov equation residual " << residual.cwiseAbs().maxCoeff() << " exceeds 1e-9";
    throw std::invalid_argument(os.str());
  }

  LinearPlant plant;
  plant.A = A;
  plant.B = B;
  plant.K = K;
  plant.P = P;
  plant.Q = Q;
  plant.PBK = P * B * K;

  const double computed = decay_rate_kappa(P, Q);
  plant.kappa = computed;
  if (kappa_override) {
    const double k = *kappa_override;
    if (!(k > 0.0)) throw std::invalid_argument("kappa must be positive");
    Eigen::SelfAdjointEigenSolver<Mat> es(Q - k * P, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) {
      throw std::invalid_argument("configured kappa violates Q - kappa*P >= 0");
    }
    if (std::abs(k - computed) > 0.01 * computed) {
      std::ostringstream os;
      os << "configured kappa " << k << " differs from computed " << computed << " by more than 1%";
      plant.warnings.push_back(os.str());
    }
    plant.kappa = k;
  }
  return plant;
}

Vec closed_loop_field_linear(const LinearPlant& plant, const Vec& x, const Vec& e) {
  if (x.size() != plant.dim() || e.size() != plant.dim()) {
    throw std::invalid_argument("closed_loop_field_linear: dimension mismatch");
  }
  return plant.A * x + plant.B * (plant.K * (x + e));
}

double lyapunov_value(const LinearPlant& plant, const Vec& x) {
  if (x.size() != plant.dim()) {
    throw std::invalid_argument("lyapunov_value: dimension mismatch");
  }
  return x.dot(plant.P * x);
}

}  // namespace etc
