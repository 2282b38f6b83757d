#include "mspde/schwarz/reduced.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mspde/io/csv.hpp"
#include "mspde/linalg/operator_handle.hpp"
#include "mspde/linalg/rng.hpp"

namespace mspde {

ReducedMap compress_local_operator(const PatchLocal& local, int r, int p,
                                   std::uint64_t seed) {
  OperatorHandle op;
  op.rows = local.n_target;
  op.cols = local.n_boundary;
  op.apply = local.apply_S;
  op.adjoint_apply = local.apply_ST;
  ReducedMap m;
  m.patch_id = local.id;
  m.r = r;
  m.p = p;
  m.seed = seed;
  m.f = randomized_svd(op, r, p, seed);
  return m;
}

std::vector<ReducedMap> compress_all(const PatchSystem& sys, int r, int p,
                                     std::uint64_t master_seed) {
  std::vector<ReducedMap> maps;
  maps.reserve(sys.locals.size());
  for (const PatchLocal& L : sys.locals)
    maps.push_back(compress_local_operator(
        L, r, p, derive_seed(master_seed, "compress", (std::uint64_t)L.id)));
  return maps;
}

Vector reduced_apply(const ReducedMap& m, const Vector& f) {
  return m.f.U * (m.f.S.asDiagonal() * (m.f.V.transpose() * f));
}

SchwarzResult reduced_schwarz_solve(const PatchSystem& sys,
                                    const std::vector<ReducedMap>& maps,
                                    const Vector& phi,
                                    const SchwarzOptions& opts,
                                    const Vector* reference) {
  if (maps.size() != sys.locals.size())
    throw std::invalid_argument("reduced_schwarz_solve: one map per patch");
  for (size_t m = 0; m < maps.size(); ++m) {
    if (maps[m].patch_id != (int)m)
      throw std::invalid_argument("reduced_schwarz_solve: maps out of order");
    if (maps[m].f.U.rows() != sys.locals[m].n_target ||
        maps[m].f.V.rows() != sys.locals[m].n_boundary)
      throw std::invalid_argument("reduced_schwarz_solve: map shape mismatch");
  }
  detail::LocalEval eval = [&maps](int m, const Vector& f) {
    return reduced_apply(maps[m], f);
  };
  return detail::schwarz_iterate(sys, phi, opts, eval, reference);
}

void save_reduced_maps(const std::string& dir,
                       const std::vector<ReducedMap>& maps,
                       const nlohmann::json& spec) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["schema_version"] = 1;
  manifest["type"] = "reduced_maps";
  manifest["spec"] = spec;
  manifest["patches"] = nlohmann::json::array();
  for (const ReducedMap& m : maps) {
    const std::string id = std::to_string(m.patch_id);
    write_matrix_csv(dir + "/U_" + id + ".csv", m.f.U);
    write_vector_csv(dir + "/S_" + id + ".csv", m.f.S);
    write_matrix_csv(dir + "/V_" + id + ".csv", m.f.V);
    manifest["patches"].push_back({{"id", m.patch_id},
                                   {"r", m.r},
                                   {"p", m.p},
                                   {"seed", m.seed}});
  }
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

std::vector<ReducedMap> load_reduced_maps(const std::string& dir,
                                          const nlohmann::json& expected_spec) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw std::runtime_error("cannot read manifest in " + dir);
  nlohmann::json manifest;
  in >> manifest;
  if (manifest.value("type", "") != "reduced_maps")
    throw std::runtime_error("not a reduced-map store: " + dir);
  if (manifest["spec"] != expected_spec)
    throw std::runtime_error("mismatched problem spec in " + dir);
  std::vector<ReducedMap> maps;
  for (const auto& pk : manifest["patches"]) {
    ReducedMap m;
    m.patch_id = pk["id"].get<int>();
    m.r = pk["r"].get<int>();
    m.p = pk["p"].get<int>();
    m.seed = pk["seed"].get<std::uint64_t>();
    const std::string id = std::to_string(m.patch_id);
    m.f.U = read_matrix_csv(dir + "/U_" + id + ".csv");
    m.f.S = read_vector_csv(dir + "/S_" + id + ".csv");
    m.f.V = read_matrix_csv(dir + "/V_" + id + ".csv");
    maps.push_back(std::move(m));
  }
  return maps;
}

}  // namespace mspde
