#pragma once

#include <cstdint>
#include <functional>
#include <memory>

#include "mspde/core.hpp"

namespace mspde {

// Matrix-free linear operator. apply maps the domain (size cols) into the
// codomain (size rows); adjoint_apply is the Euclidean transpose. Everything
// downstream that only needs matvecs (range finding, compression) takes one
// of these instead of an assembled matrix.
struct OperatorHandle {
  int rows = 0;
  int cols = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> adjoint_apply;
};

OperatorHandle dense_operator(DenseMatrix a);

struct ApplyCounts {
  long forward = 0;
  long adjoint = 0;
};

// Wraps op so every call is tallied in counts. Used to assert sampling
// budgets in tests and to report solver work.
OperatorHandle counted_operator(OperatorHandle op,
                                std::shared_ptr<ApplyCounts> counts);

// Randomized SVD sketch of op at rank r with oversampling p: draws r+p
// Gaussian probes, orthonormalizes the forward images, and recovers the
// factors from r+p adjoint applications. Exactly r+p calls to each of
// apply and adjoint_apply, no more.
SvdTriple randomized_svd(const OperatorHandle& op, int r, int p,
                         std::uint64_t seed);

}  // namespace mspde
