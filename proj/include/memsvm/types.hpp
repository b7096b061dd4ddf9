#pragma once

#include <Eigen/Dense>

namespace memsvm {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using VectorXi = Eigen::VectorXi;
using MatrixXi = Eigen::MatrixXi;

}  // namespace memsvm
