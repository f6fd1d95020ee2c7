#pragma once

#include <Eigen/Dense>

#include <complex>

namespace iaosim {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

}  // namespace iaosim
