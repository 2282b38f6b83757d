#pragma once

#include <functional>
#include <string>

#include "mspde/core.hpp"
#include "mspde/rte/ordinates.hpp"

namespace mspde {

// Collision kernel k(x, v, v') for the scattering operator
//   S[u](x,v) = sum_l k(x,v,v_l) w_l u(x,v_l) - (sum_l k(x,v,v_l) w_l) u(x,v).
// The loss coefficient is the quadrature row sum of the gain kernel, so gain
// and loss balance exactly and constants are collision equilibria for every
// kernel kind.
//
// Kinds:
//   isotropic_diffusive  k = sigma(x)/epsilon, strong scattering scaling
//   heterogeneous        k = sigma(x), any amplitude baked into sigma
//   henyey_greenstein    k ~ (1-g^2)/(1+g^2-2g v v')^{3/2}, each row
//                        normalized to quadrature sum 1, scaled by 1/epsilon
struct CollisionKernel {
  std::string kind;
  double epsilon = 1.0;
  double g = 0.5;
  std::function<double(double)> sigma;
};

CollisionKernel isotropic_kernel(double epsilon, double sigma_const = 1.0);
CollisionKernel isotropic_kernel(double epsilon, std::function<double(double)> sigma);
CollisionKernel heterogeneous_kernel(std::function<double(double)> sigma);
// sigma(x) = (1/eps1) (1.1 + cos(4 pi x)) / (1.1 + sin(2 pi x / eps2))
CollisionKernel heterogeneous_two_scale(double eps1, double eps2);
CollisionKernel henyey_greenstein_kernel(double epsilon, double g);

// Gain kernel matrix K(j,l) = k(x, v_j, v_l) at one spatial point.
DenseMatrix kernel_matrix(const CollisionKernel& k, const OrdinateSet& ords,
                          double x);

}  // namespace mspde
