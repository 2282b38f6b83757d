#include "mspde/rte/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CollisionKernel isotropic_kernel(double epsilon, double sigma_const) {
  return isotropic_kernel(epsilon,
                          [sigma_const](double) { return sigma_const; });
}

CollisionKernel isotropic_kernel(double epsilon,
                                 std::function<double(double)> sigma) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("isotropic_kernel: epsilon must be positive");
  CollisionKernel k;
  k.kind = "isotropic_diffusive";
  k.epsilon = epsilon;
  k.sigma = std::move(sigma);
  return k;
}

CollisionKernel heterogeneous_kernel(std::function<double(double)> sigma) {
  CollisionKernel k;
  k.kind = "heterogeneous";
  k.sigma = std::move(sigma);
  return k;
}

CollisionKernel heterogeneous_two_scale(double eps1, double eps2) {
  if (!(eps1 > 0.0) || !(eps2 > 0.0))
    throw std::invalid_argument("heterogeneous_two_scale: scales must be positive");
  return heterogeneous_kernel([eps1, eps2](double x) {
    return (1.1 + std::cos(4.0 * kPi * x)) /
           (eps1 * (1.1 + std::sin(2.0 * kPi * x / eps2)));
  });
}

CollisionKernel henyey_greenstein_kernel(double epsilon, double g) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("henyey_greenstein_kernel: epsilon must be positive");
  if (!(g > -1.0 && g < 1.0))
    throw std::invalid_argument("henyey_greenstein_kernel: need |g| < 1");
  CollisionKernel k;
  k.kind = "henyey_greenstein";
  k.epsilon = epsilon;
  k.g = g;
  return k;
}

DenseMatrix kernel_matrix(const CollisionKernel& k, const OrdinateSet& ords,
                          double x) {
  const int n = ords.size();
  DenseMatrix m(n, n);
  if (k.kind == "isotropic_diffusive") {
    const double v = k.sigma(x) / k.epsilon;
    m.setConstant(v);
  } else if (k.kind == "heterogeneous") {
    const double v = k.sigma(x);
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::runtime_error("kernel_matrix: sigma must be finite and nonnegative");
    m.setConstant(v);
  } else if (k.kind == "henyey_greenstein") {
    const double g = k.g;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const double d = 1.0 + g * g - 2.0 * g * ords.v(j) * ords.v(l);
        m(j, l) = (1.0 - g * g) / (d * std::sqrt(d));
      }
    // per-row quadrature normalization to total cross section 1/epsilon
    for (int j = 0; j < n; ++j) {
      const double rs = m.row(j).dot(ords.w);
      m.row(j) /= rs * k.epsilon;
    }
  } else {
    throw std::invalid_argument("kernel_matrix: unknown kernel kind " + k.kind);
  }
  return m;
}

}  // namespace mspde
