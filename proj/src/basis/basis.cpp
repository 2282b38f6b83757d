#include "mspde/basis/basis.hpp"

#include <filesystem>
#include <map>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "mspde/io/csv.hpp"
#include "mspde/linalg/rng.hpp"

namespace mspde {

LocalBasis offline_random_basis(const PatchSystem& sys, int patch, int k,
                                std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("offline_random_basis: k must be >= 1");
  const PatchLocal& L = sys.locals.at(patch);
  LocalBasis b;
  b.patch_id = patch;
  b.kind = "random";
  b.seed = seed;
  b.boundary = gaussian_matrix(L.n_boundary, k, seed);
  b.columns.resize(L.n_full, k);
  for (int j = 0; j < k; ++j) b.columns.col(j) = L.solve_full(b.boundary.col(j));
  return b;
}

LocalBasis offline_full_basis(const PatchSystem& sys, int patch) {
  const PatchLocal& L = sys.locals.at(patch);
  LocalBasis b;
  b.patch_id = patch;
  b.kind = "full";
  b.boundary = DenseMatrix::Identity(L.n_boundary, L.n_boundary);
  b.columns.resize(L.n_full, L.n_boundary);
  for (int j = 0; j < L.n_boundary; ++j)
    b.columns.col(j) = L.solve_full(b.boundary.col(j));
  return b;
}

AssembleResult online_assemble(const PatchSystem& sys,
                               const std::vector<LocalBasis>& bases,
                               const Vector& phi,
                               const AssembleOptions& opts) {
  const size_t np = sys.locals.size();
  if (bases.size() != np)
    throw std::invalid_argument("online_assemble: one basis per patch");
  if (phi.size() != sys.phi_size)
    throw std::invalid_argument("online_assemble: phi size mismatch");
  const Grid& g = sys.part.grid;
  const int ncomp = sys.ncomp;

  std::vector<int> offset(np + 1, 0);
  for (size_t m = 0; m < np; ++m) {
    if (bases[m].patch_id != (int)m)
      throw std::invalid_argument("online_assemble: bases out of order");
    if (bases[m].columns.rows() != sys.locals[m].n_full)
      throw std::invalid_argument("online_assemble: basis shape mismatch");
    offset[m + 1] = offset[m] + (int)bases[m].columns.cols();
  }
  const int ncols = offset[np];

  // Overlap rows tie each local field to the chi-blended global field:
  // chi_m(x) (u_m(x) - sum_n chi_n(x) u_n(x)) at every value covered by more
  // than one patch. The chi_m weight mutes the row where the blend ignores
  // u_m anyway (near m's artificial edge, where a truncated basis cannot
  // match pointwise values), and keeps full strength where patches overlap
  // with comparable weights.
  struct Cover {
    int patch;
    int lidx;
    double chi;
  };
  std::map<long, std::vector<Cover>> cover;
  for (size_t m = 0; m < np; ++m) {
    const PatchLocal& L = sys.locals[m];
    for (int i = 0; i < L.n_full; ++i)
      cover[L.full_to_global[i]].push_back({(int)m, i, L.chi_full(i)});
  }
  long n_glue = 0;
  for (const auto& [gid, cs] : cover)
    if (cs.size() > 1)
      for (const Cover& self : cs)
        if (self.chi != 0.0) ++n_glue;

  // Global boundary rows constrain the blended field, one row per boundary
  // value: sum_m chi_m u_m = phi. Group the pins by their phi component.
  std::map<int, std::vector<const Pin*>> by_phi;
  for (const Pin& p : sys.pins) by_phi[p.phi_idx].push_back(&p);

  const long nrows = n_glue + (long)by_phi.size();
  DenseMatrix a = DenseMatrix::Zero(nrows, ncols);
  Vector rhs = Vector::Zero(nrows);
  long row = 0;
  for (const auto& [gid, cs] : cover) {
    if (cs.size() < 2) continue;
    for (const Cover& self : cs) {
      if (self.chi == 0.0) continue;
      a.block(row, offset[self.patch], 1, bases[self.patch].columns.cols()) =
          self.chi * bases[self.patch].columns.row(self.lidx);
      for (const Cover& other : cs)
        if (other.chi != 0.0)
          a.block(row, offset[other.patch], 1,
                  bases[other.patch].columns.cols()) -=
              self.chi * other.chi * bases[other.patch].columns.row(other.lidx);
      ++row;
    }
  }
  for (const auto& [phi_idx, group] : by_phi) {
    for (const Pin* p : group) {
      const double chi = sys.locals[p->patch].chi_full(p->full_idx);
      if (chi == 0.0) continue;
      a.block(row, offset[p->patch], 1, bases[p->patch].columns.cols()) +=
          opts.boundary_weight * chi * bases[p->patch].columns.row(p->full_idx);
    }
    rhs(row) = opts.boundary_weight * phi(phi_idx);
    ++row;
  }

  Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(a);
  const Vector c = cod.solve(rhs);

  AssembleResult res;
  res.rank = (int)cod.rank();
  res.underdetermined = res.rank < ncols;
  res.residual = (a * c - rhs).norm();
  res.coeffs.resize(np);
  std::vector<Vector> locals(np);
  for (size_t m = 0; m < np; ++m) {
    res.coeffs[m] = c.segment(offset[m], bases[m].columns.cols());
    locals[m] = bases[m].columns * res.coeffs[m];
  }
  res.u_global = pou_blend(sys.part, locals, ncomp);
  return res;
}

void save_bases(const std::string& dir, const std::vector<LocalBasis>& bases,
                const nlohmann::json& spec) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["schema_version"] = 1;
  manifest["type"] = "local_bases";
  manifest["spec"] = spec;
  manifest["patches"] = nlohmann::json::array();
  for (const LocalBasis& b : bases) {
    const std::string id = std::to_string(b.patch_id);
    write_matrix_csv(dir + "/basis_" + id + ".csv", b.columns);
    write_matrix_csv(dir + "/boundary_" + id + ".csv", b.boundary);
    manifest["patches"].push_back({{"id", b.patch_id},
                                   {"kind", b.kind},
                                   {"k", (int)b.columns.cols()},
                                   {"seed", b.seed}});
  }
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

std::vector<LocalBasis> load_bases(const std::string& dir,
                                   const nlohmann::json& expected_spec) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw std::runtime_error("cannot read manifest in " + dir);
  nlohmann::json manifest;
  in >> manifest;
  if (manifest.value("type", "") != "local_bases")
    throw std::runtime_error("not a basis store: " + dir);
  if (manifest["spec"] != expected_spec)
    throw std::runtime_error("mismatched problem spec in " + dir);
  std::vector<LocalBasis> bases;
  for (const auto& pk : manifest["patches"]) {
    LocalBasis b;
    b.patch_id = pk["id"].get<int>();
    b.kind = pk["kind"].get<std::string>();
    b.seed = pk["seed"].get<std::uint64_t>();
    const std::string id = std::to_string(b.patch_id);
    b.columns = read_matrix_csv(dir + "/basis_" + id + ".csv");
    b.boundary = read_matrix_csv(dir + "/boundary_" + id + ".csv");
    bases.push_back(std::move(b));
  }
  return bases;
}

}  // namespace mspde
