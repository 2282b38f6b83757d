#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "mspde/schwarz/schwarz.hpp"

namespace mspde {

// Rank-(r+p) factorization of one patch's confined solution map, sketched
// with r+p random probes. Online evaluation costs one k-vector contraction
// per sweep instead of a fine solve.
struct ReducedMap {
  int patch_id = 0;
  int r = 0;
  int p = 0;
  std::uint64_t seed = 0;
  SvdTriple f;  // target x k, k, boundary x k
};

ReducedMap compress_local_operator(const PatchLocal& local, int r, int p,
                                   std::uint64_t seed);

// One map per patch, seeds derived from the master seed per patch id.
std::vector<ReducedMap> compress_all(const PatchSystem& sys, int r, int p,
                                     std::uint64_t master_seed);

Vector reduced_apply(const ReducedMap& m, const Vector& f);

// Same interface iteration as schwarz_solve, with every in-loop local solve
// replaced by the compressed map. The final blend still runs one full solve
// per patch.
SchwarzResult reduced_schwarz_solve(const PatchSystem& sys,
                                    const std::vector<ReducedMap>& maps,
                                    const Vector& phi,
                                    const SchwarzOptions& opts,
                                    const Vector* reference = nullptr);

// Directory layout: manifest.json plus U_<id>.csv, S_<id>.csv, V_<id>.csv
// per patch. The manifest embeds the caller's problem spec; loading checks
// it verbatim and refuses mismatches.
void save_reduced_maps(const std::string& dir,
                       const std::vector<ReducedMap>& maps,
                       const nlohmann::json& spec);
std::vector<ReducedMap> load_reduced_maps(const std::string& dir,
                                          const nlohmann::json& expected_spec);

}  // namespace mspde
