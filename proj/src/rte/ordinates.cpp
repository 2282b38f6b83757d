#include "mspde/rte/ordinates.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

OrdinateSet gauss_legendre(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("gauss_legendre: ordinate count must be even and >= 2");
  OrdinateSet s;
  s.v.resize(n);
  s.w.resize(n);
  // Newton on P_n with the three-term recurrence; roots are symmetric so
  // only the positive half is computed
  for (int i = 0; i < n / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    // ascending order: i = 0 is the largest root
    s.v(i) = -x;
    s.v(n - 1 - i) = x;
    s.w(i) = w;
    s.w(n - 1 - i) = w;
  }
  return s;
}

}  // namespace mspde
