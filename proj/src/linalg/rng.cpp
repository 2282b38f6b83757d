#include "mspde/linalg/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t CounterRng::next_u64() {
  return finalize(key_ + (++ctr_) * kGamma);
}

double CounterRng::uniform01() {
  // 53-bit mantissa, shifted into (0, 1] so log() below is always finite
  return (double)((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform01();
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::uint64_t index) {
  // FNV-1a over the label, then mixed with master and index
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  h ^= master + kGamma;
  h = finalize(h);
  h ^= index * 0xD6E8FEB86659FD93ull;
  return finalize(h);
}

DenseMatrix gaussian_matrix(int rows, int cols, std::uint64_t seed) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("gaussian_matrix: empty matrix");
  CounterRng rng(seed);
  DenseMatrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

}  // namespace mspde
