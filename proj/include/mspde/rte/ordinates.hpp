#pragma once

#include "mspde/core.hpp"

namespace mspde {

// Discrete velocity set on [-1, 1]: Gauss-Legendre nodes and weights.
// n must be even so no ordinate sits at v = 0; nodes come out symmetric
// and the weights sum to 2.
struct OrdinateSet {
  Vector v;
  Vector w;
  int size() const { return (int)v.size(); }
};

OrdinateSet gauss_legendre(int n);

}  // namespace mspde
