#pragma once

#include <Eigen/Dense>

namespace carleman {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

inline double inf_norm(const Matrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

inline double inf_norm(const CMatrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace carleman
