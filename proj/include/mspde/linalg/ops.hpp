#pragma once

#include "mspde/core.hpp"

namespace mspde {

// Orthonormal basis of range(M) via column-pivoted QR. Columns whose pivot
// falls below rel_tol times the largest pivot are dropped, so the result can
// have fewer columns than M. A zero matrix yields zero columns.
DenseMatrix qr_orthonormalize(const DenseMatrix& m, double rel_tol = 1e-12);

// Thin SVD with singular values in nonincreasing order.
SvdTriple thin_svd(const DenseMatrix& m);

// Number of singular values strictly greater than tau.
int numerical_rank(const Vector& s, double tau);

// Largest principal angle (radians) between the column spans of a and b.
// Throws if either span is degenerate (zero or empty).
double subspace_angle(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace mspde
