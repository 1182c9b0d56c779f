// types.hpp - dense linear-algebra aliases
#pragma once

#include <Eigen/Dense>
#include <complex>

namespace relax {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

}  // namespace relax
