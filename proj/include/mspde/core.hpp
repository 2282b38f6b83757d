#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace mspde {

using DenseMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

// thin SVD factors, A ~= U * S.asDiagonal() * V^T
struct SvdTriple {
  DenseMatrix U;
  Vector S;
  DenseMatrix V;
};

}  // namespace mspde
