#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ice {

using Vec = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat = Eigen::MatrixXd;
using Mat2 = Eigen::Matrix2d;
using CVec = Eigen::VectorXcd;
using Complex = std::complex<double>;

}  // namespace ice
