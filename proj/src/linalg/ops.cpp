#include "mspde/linalg/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mspde {

DenseMatrix qr_orthonormalize(const DenseMatrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("qr_orthonormalize: empty matrix");
  Eigen::ColPivHouseholderQR<DenseMatrix> qr(m);
  const auto& r = qr.matrixR();
  const int nmin = (int)std::min(m.rows(), m.cols());
  const double pmax = std::abs(r(0, 0));
  int rank = 0;
  // pivoted R has nonincreasing |diagonal|
  for (int i = 0; i < nmin; ++i) {
    if (std::abs(r(i, i)) > rel_tol * pmax)
      ++rank;
    else
      break;
  }
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(m.rows(), rank);
  return q;
}

SvdTriple thin_svd(const DenseMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0)
    throw std::invalid_argument("thin_svd: empty matrix");
  Eigen::BDCSVD<DenseMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

int numerical_rank(const Vector& s, double tau) {
  int n = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > tau) ++n;
  return n;
}

double subspace_angle(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix qa = qr_orthonormalize(a);
  const DenseMatrix qb = qr_orthonormalize(b);
  if (qa.cols() == 0 || qb.cols() == 0)
    throw std::invalid_argument("subspace_angle: degenerate subspace");
  const DenseMatrix c = qa.transpose() * qb;
  Eigen::JacobiSVD<DenseMatrix> svd(c);
  const double smin = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  // acos loses half the significant digits near 1; switch to the sine form
  // (residual of projecting qb onto range(qa)) for small angles.
  if (smin * smin > 0.5) {
    Eigen::JacobiSVD<DenseMatrix> s2(qb - qa * c);
    const double smax = std::clamp(s2.singularValues().maxCoeff(), 0.0, 1.0);
    return std::asin(smax);
  }
  return std::acos(smin);
}

}  // namespace mspde
