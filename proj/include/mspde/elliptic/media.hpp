#pragma once

#include <functional>
#include <string>

namespace mspde {

// Scalar diffusion coefficient a(x). The oscillation scale epsilon is baked
// into the evaluator; 1D problems pass x2 = 0.
struct MediaField {
  std::string label;
  double epsilon = 1.0;
  std::function<double(double, double)> a;
};

// Named coefficient fields:
//   constant      a = 1
//   periodic_1d   a = 2 + sin(2 pi x/eps)
//   fig5          smooth two-scale 2D field, three oscillatory ratio terms
//   fig3_channel  1 + 1000 on a spiral channel (high contrast, no eps)
//   fig7          two-scale 2D ratio field with a non-oscillatory coupling
MediaField media_preset(const std::string& name, double epsilon);

}  // namespace mspde
