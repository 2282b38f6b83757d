#include "mspde/elliptic/media.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MediaField media_preset(const std::string& name, double epsilon) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("media_preset: epsilon must be positive");
  MediaField m;
  m.label = name;
  m.epsilon = epsilon;
  const double eps = epsilon;

  if (name == "constant") {
    m.a = [](double, double) { return 1.0; };
  } else if (name == "periodic_1d") {
    m.a = [eps](double x, double) { return 2.0 + std::sin(2.0 * kPi * x / eps); };
  } else if (name == "fig5") {
    m.a = [eps](double x, double y) {
      return 2.0 + std::sin(2.0 * kPi * x) * std::cos(2.0 * kPi * y) +
             (2.0 + 1.8 * std::sin(2.0 * kPi * x / eps)) /
                 (2.0 + 1.8 * std::cos(2.0 * kPi * y / eps)) +
             (2.0 + std::sin(2.0 * kPi * y / eps)) /
                 (2.0 + 1.8 * std::cos(2.0 * kPi * x / eps));
    };
  } else if (name == "fig3_channel") {
    m.a = [](double x, double y) {
      const double r = std::sqrt((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5));
      const bool in_channel = x * std::cos(100.0 * r) <= y - 0.5;
      return in_channel ? 1001.0 : 1.0;
    };
  } else if (name == "fig7") {
    m.a = [eps](double x, double y) {
      return (2.0 + 1.8 * std::sin(kPi * x / eps)) /
                 (2.0 + 1.8 * std::cos(kPi * y / eps)) +
             (2.0 + std::sin(kPi * y / eps)) /
                 (2.0 + 1.8 * std::sin(kPi * x));
    };
  } else {
    throw std::invalid_argument(
        "media_preset: unknown preset '" + name +
        "' (valid: constant, periodic_1d, fig5, fig3_channel, fig7)");
  }
  return m;
}

}  // namespace mspde
