#pragma once

#include <cstdint>
#include <string_view>

#include "mspde/core.hpp"

namespace mspde {

// Counter-based generator: draw i is a pure function of (key, i), so a stream
// can be replayed from its seed alone, independent of platform or call site.
// The word function is the splitmix64 finalizer; normals come from Box-Muller.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64();
  double uniform01();  // in (0, 1]
  double normal();     // standard normal

 private:
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable per-stage seed derivation: hashes the stage label and an index into
// the master seed so that independent pipeline stages draw from disjoint
// streams no matter in which order they run.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage,
                          std::uint64_t index = 0);

// rows x cols matrix of iid standard normals, filled in column-major order.
DenseMatrix gaussian_matrix(int rows, int cols, std::uint64_t seed);

}  // namespace mspde
