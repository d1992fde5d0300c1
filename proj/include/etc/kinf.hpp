#pragma once

#include <memory>
#include <string>
#include <vector>

namespace etc {

/// A class-K-infinity scalar function from a closed family:
/// linear c*r, power c*r^p with p >= 1, or a sum of two members.
/// Immutable after construction; safe to share across threads.
class KInfFunction {
 public:
  enum class Kind { Linear, Power, Sum };

  static KInfFunction linear(double gain);
  static KInfFunction power(double gain, double exponent);
  static KInfFunction sum(KInfFunction lhs, KInfFunction rhs);

  /// Evaluates the function. Throws std::domain_error for r < 0.
  double operator()(double r) const;

  Kind kind() const { return kind_; }
  double gain() const { return gain_; }
  double exponent() const { return exponent_; }
  const KInfFunction& lhs() const { return *lhs_; }
  const KInfFunction& rhs() const { return *rhs_; }

 private:
  KInfFunction() = default;

  Kind kind_ = Kind::Linear;
  double gain_ = 0.0;
  double exponent_ = 1.0;
  std::shared_ptr<const KInfFunction> lhs_, rhs_;
};

struct KInfCheckReport {
  bool passed = true;
  std::vector<std::string> violations;
};

/// Validates f(0)=0, strict monotonicity over consecutive grid points and
/// growth at large arguments. The grid must start at 0 and be strictly
/// increasing; an empty grid is an argument error.
KInfCheckReport check_kinf(const KInfFunction& f, const std::vector<double>& grid);

}  // namespace etc
