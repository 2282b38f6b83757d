#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mspde/schwarz/patch_system.hpp"

namespace mspde {

// Snapshot basis for one patch: each column is a confined local solve, the
// matching column of boundary holds the data it was driven with. Random
// bases sample Gaussian boundary data; the full basis runs one solve per
// boundary degree of freedom.
struct LocalBasis {
  int patch_id = 0;
  std::string kind;  // "random" | "full"
  std::uint64_t seed = 0;
  DenseMatrix columns;   // n_full x k
  DenseMatrix boundary;  // n_boundary x k
};

LocalBasis offline_random_basis(const PatchSystem& sys, int patch, int k,
                                std::uint64_t seed);
LocalBasis offline_full_basis(const PatchSystem& sys, int patch);

struct AssembleOptions {
  double boundary_weight = 10.0;  // weight of global-boundary rows
};

struct AssembleResult {
  Vector u_global;             // chi blend of the per-patch combinations
  std::vector<Vector> coeffs;  // per patch
  int rank = 0;
  bool underdetermined = false;  // rank < total columns; minimum-norm answer
  double residual = 0.0;         // least-squares residual norm
};

// Global continuity matching: at every lattice value covered by more than
// one patch, a row per covering patch ties that patch's local field to the
// chi-blended global field (weighted by its own chi so rows fade out toward
// the artificial edge), plus weighted rows pinning the blended field to phi
// at global-boundary values. Solved by minimum-norm least squares; rank
// deficiency is flagged, never silently dropped.
AssembleResult online_assemble(const PatchSystem& sys,
                               const std::vector<LocalBasis>& bases,
                               const Vector& phi,
                               const AssembleOptions& opts = {});

// Directory layout: manifest.json plus basis_<id>.csv and boundary_<id>.csv
// per patch; loading checks the embedded spec and refuses mismatches.
void save_bases(const std::string& dir, const std::vector<LocalBasis>& bases,
                const nlohmann::json& spec);
std::vector<LocalBasis> load_bases(const std::string& dir,
                                   const nlohmann::json& expected_spec);

}  // namespace mspde
