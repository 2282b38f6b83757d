#include <stdexcept>
#include <utility>

#include "mspde/linalg/operator_handle.hpp"
#include "mspde/linalg/ops.hpp"
#include "mspde/linalg/rng.hpp"

namespace mspde {

OperatorHandle dense_operator(DenseMatrix a) {
  auto m = std::make_shared<DenseMatrix>(std::move(a));
  OperatorHandle op;
  op.rows = (int)m->rows();
  op.cols = (int)m->cols();
  op.apply = [m](const Vector& x) -> Vector { return (*m) * x; };
  op.adjoint_apply = [m](const Vector& y) -> Vector {
    return m->transpose() * y;
  };
  return op;
}

OperatorHandle counted_operator(OperatorHandle op,
                                std::shared_ptr<ApplyCounts> counts) {
  OperatorHandle out;
  out.rows = op.rows;
  out.cols = op.cols;
  auto fwd = op.apply;
  auto adj = op.adjoint_apply;
  out.apply = [fwd, counts](const Vector& x) {
    ++counts->forward;
    return fwd(x);
  };
  out.adjoint_apply = [adj, counts](const Vector& y) {
    ++counts->adjoint;
    return adj(y);
  };
  return out;
}

SvdTriple randomized_svd(const OperatorHandle& op, int r, int p,
                         std::uint64_t seed) {
  if (r < 1 || p < 1)
    throw std::invalid_argument("randomized_svd: need r >= 1 and p >= 1");
  const int k = r + p;
  if (k > std::min(op.rows, op.cols))
    throw std::invalid_argument("randomized_svd: oversampled beyond rank");

  const DenseMatrix omega = gaussian_matrix(op.cols, k, seed);

  DenseMatrix y(op.rows, k);
  for (int j = 0; j < k; ++j) y.col(j) = op.apply(omega.col(j));

  // unpivoted thin QR keeps exactly k columns even when Y is rank deficient;
  // surplus directions just carry ~zero singular values through
  Eigen::HouseholderQR<DenseMatrix> qr(y);
  const DenseMatrix q =
      qr.householderQ() * DenseMatrix::Identity(op.rows, k);

  DenseMatrix b(op.cols, k);
  for (int j = 0; j < k; ++j) b.col(j) = op.adjoint_apply(q.col(j));

  SvdTriple f = thin_svd(b.transpose());  // B^T = Utilde * S * V^T
  return {q * f.U, f.S, f.V};
}

}  // namespace mspde
