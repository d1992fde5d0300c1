#include "etc/kinf.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace etc {

KInfFunction KInfFunction::linear(double gain) {
  if (gain < 0.0) throw std::invalid_argument("KInfFunction: gain must be nonnegative");
  KInfFunction f;
  f.kind_ = Kind::Linear;
  f.gain_ = gain;
  return f;
}

KInfFunction KInfFunction::power(double gain, double exponent) {
  if (gain < 0.0) throw std::invalid_argument("KInfFunction: gain must be nonnegative");
  if (exponent < 1.0) throw std::invalid_argument("KInfFunction: exponent must be >= 1");
  KInfFunction f;
  f.kind_ = Kind::Power;
  f.gain_ = gain;
  f.exponent_ = exponent;
  return f;
}

KInfFunction KInfFunction::sum(KInfFunction lhs, KInfFunction rhs) {
  KInfFunction f;
  f.kind_ = Kind::Sum;
  f.lhs_ = std::make_shared<const KInfFunction>(std::move(lhs));
  f.rhs_ = std::make_shared<const KInfFunction>(std::move(rhs));
  return f;
}

double KInfFunction::operator()(double r) const {
  if (r < 0.0) throw std::domain_error("KInfFunction: negative argument");
  switch (kind_) {
    case Kind::Linear:
      return gain_ * r;
    case Kind::Power:
      return gain_ * std::pow(r, exponent_);
    case Kind::Sum:
      return (*lhs_)(r) + (*rhs_)(r);
  }
  return 0.0;  // unreachable
}

KInfCheckReport check_kinf(const KInfFunction& f, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("check_kinf: empty grid");
  if (grid.front() != 0.0) throw std::invalid_argument("check_kinf: grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("check_kinf: grid must be strictly increasing");
  }

  KInfCheckReport report;
  auto fail = [&](const std::string& msg) {
    report.passed = false;
    report.violations.push_back(msg);
  };

  if (f(0.0) != 0.0) fail("f(0) != 0");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(f(grid[i - 1]) < f(grid[i]))) {
      std::ostringstream os;
      os << "not strictly increasing on [" << grid[i - 1] << ", " << grid[i] << "]";
      fail(os.str());
    }
  }
  // Unboundedness holds by construction when the gains are positive; probe a
  // large argument to catch degenerate (zero-gain) functions.
  if (!(f(1e8) > 1e6)) fail("not unbounded: f(1e8) <= 1e6");
  return report;
}

}  // namespace etc
