#pragma once

#include <Eigen/Dense>

namespace etc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace etc
