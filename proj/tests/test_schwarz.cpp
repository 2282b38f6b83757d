#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>
#include <json.hpp>

#include "mspde/elliptic/media.hpp"
#include "mspde/elliptic/solver.hpp"
#include "mspde/linalg/rng.hpp"
#include "mspde/partition/partition.hpp"
#include "mspde/rte/kernel.hpp"
#include "mspde/rte/ordinates.hpp"
#include "mspde/schwarz/reduced.hpp"
#include "mspde/schwarz/schwarz.hpp"

using namespace mspde;

namespace {

Box whole_box(const Grid& g) {
  Box b;
  b.hi[0] = g.ax[0].cells;
  if (g.dim == 2) b.hi[1] = g.ax[1].cells;
  return b;
}

Vector random_vec(Eigen::Index n, std::uint64_t key) {
  CounterRng rng(key);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v;
}

double rel_l2(const Vector& got, const Vector& want) {
  return (got - want).norm() / want.norm();
}

// dense assembly of one patch's confined map from its public apply
DenseMatrix dense_confined(const PatchLocal& L) {
  DenseMatrix s(L.n_target, L.n_boundary);
  Vector e = Vector::Zero(L.n_boundary);
  for (int c = 0; c < L.n_boundary; ++c) {
    e(c) = 1.0;
    s.col(c) = L.apply_S(e);
    e(c) = 0.0;
  }
  return s;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("mspde_test_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("initial interface pins phi and zeroes the rest") {
  const Grid g = Grid::rect(0, 1, 10, 0, 1, 10);
  const Partition part = build_partition(g, {2, 2}, 2);
  const PatchSystem sys = build_elliptic_system(part, media_preset("constant", 1.0));
  const Vector phi = random_vec(sys.phi_size, derive_seed(7, "phi", 0));

  const std::vector<Vector> f = initial_interface(sys, phi);
  REQUIRE(f.size() == sys.locals.size());
  std::vector<std::vector<char>> pinned(f.size());
  for (size_t m = 0; m < f.size(); ++m) {
    REQUIRE(f[m].size() == sys.locals[m].n_boundary);
    pinned[m].assign(sys.locals[m].n_boundary, 0);
  }
  for (const Pin& p : sys.pins) {
    CHECK(f[p.patch](p.comp) == phi(p.phi_idx));
    pinned[p.patch][p.comp] = 1;
  }
  for (size_t m = 0; m < f.size(); ++m)
    for (int i = 0; i < sys.locals[m].n_boundary; ++i)
      if (!pinned[m][i]) CHECK(f[m](i) == 0.0);

  CHECK_THROWS_AS(initial_interface(sys, Vector::Zero(sys.phi_size + 1)),
                  std::invalid_argument);
}

TEST_CASE("btb_apply matches the spelled-out sweep") {
  const Grid g = Grid::rect(0, 1, 8, 0, 1, 8);
  const Partition part = build_partition(g, {2, 1}, 2);
  const PatchSystem sys = build_elliptic_system(part, media_preset("fig5", 0.25));
  const Vector phi = random_vec(sys.phi_size, derive_seed(9, "phi", 0));

  std::vector<Vector> f(sys.locals.size());
  for (size_t m = 0; m < f.size(); ++m)
    f[m] = random_vec(sys.locals[m].n_boundary, derive_seed(9, "f", m));

  // compose by hand: local solves to owned values, neighbor writes, pins
  std::vector<Vector> targets(f.size());
  for (size_t m = 0; m < f.size(); ++m) targets[m] = sys.locals[m].apply_S(f[m]);
  std::vector<Vector> want = f;
  for (const TraceWrite& w : sys.writes)
    want[w.dst_patch](w.dst_comp) = targets[w.src_patch](w.src_target);
  for (const Pin& p : sys.pins) want[p.patch](p.comp) = phi(p.phi_idx);

  const std::vector<Vector> got = btb_apply(sys, phi, f);
  REQUIRE(got.size() == want.size());
  for (size_t m = 0; m < got.size(); ++m)
    CHECK((got[m] - want[m]).lpNorm<Eigen::Infinity>() == 0.0);

  // the target map used above agrees with a dense assembly of S_m
  const DenseMatrix s0 = dense_confined(sys.locals[0]);
  CHECK((s0 * f[0] - targets[0]).norm() <= 1e-12 * targets[0].norm());

  CHECK_THROWS_AS(btb_apply(sys, phi, {f[0]}), std::invalid_argument);
  std::vector<Vector> bad = f;
  bad[1] = Vector::Zero(sys.locals[1].n_boundary + 3);
  CHECK_THROWS_AS(btb_apply(sys, phi, bad), std::invalid_argument);
}

TEST_CASE("single patch has no writes and converges in one sweep") {
  const Grid g = Grid::rect(0, 1, 8, 0, 1, 8);
  const Partition part = build_partition(g, {1, 1}, 2);
  const PatchSystem sys = build_elliptic_system(part, media_preset("constant", 1.0));
  CHECK(sys.writes.empty());

  const Vector phi = elliptic_phi(g, [](double x, double y) { return x * x + y; });
  const std::vector<Vector> f = initial_interface(sys, phi);
  const std::vector<Vector> g1 = btb_apply(sys, phi, f);
  for (size_t m = 0; m < f.size(); ++m)
    CHECK((g1[m] - f[m]).lpNorm<Eigen::Infinity>() == 0.0);

  SchwarzOptions opts;
  const SchwarzResult res = schwarz_solve(sys, phi, opts);
  CHECK(res.converged);
  CHECK(res.iterations == 1);

  LocalEllipticSolver direct(g, whole_box(g), media_preset("constant", 1.0));
  CHECK(rel_l2(res.u_global, direct.solve_dirichlet(phi)) <= 1e-12);
}

TEST_CASE("affine data is a fixed point and the iteration recovers it") {
  const Grid g = Grid::rect(0, 1, 12, 0, 1, 12);
  const Partition part = build_partition(g, {2, 2}, 4);
  const PatchSystem sys = build_elliptic_system(part, media_preset("constant", 1.0));
  auto ell = [](double x, double y) { return 0.3 + 0.7 * x - 1.1 * y; };
  const Vector phi = elliptic_phi(g, ell);

  // start from the exact traces: one sweep must reproduce them
  std::vector<Vector> f(sys.locals.size());
  for (size_t m = 0; m < f.size(); ++m) {
    const PatchLocal& L = sys.locals[m];
    f[m] = Vector::Zero(L.n_boundary);
    for (const Pin& p : sys.pins)
      if (p.patch == (int)m) f[m](p.comp) = phi(p.phi_idx);
    for (const TraceWrite& w : sys.writes)
      if (w.dst_patch == (int)m) {
        const long gid = sys.locals[w.src_patch].target_to_global[w.src_target];
        const auto c = g.node_coords(gid);
        f[m](w.dst_comp) = ell(g.coord(0, c[0]), g.coord(1, c[1]));
      }
  }
  const std::vector<Vector> swept = btb_apply(sys, phi, f);
  for (size_t m = 0; m < f.size(); ++m)
    CHECK((swept[m] - f[m]).lpNorm<Eigen::Infinity>() <= 1e-11);

  SchwarzOptions opts;
  opts.tol = 1e-10;
  const SchwarzResult res = schwarz_solve(sys, phi, opts);
  CHECK(res.converged);
  double worst = 0.0;
  for (long n = 0; n < g.node_count(); ++n) {
    const auto c = g.node_coords(n);
    worst = std::max(worst, std::abs(res.u_global(n) -
                                     ell(g.coord(0, c[0]), g.coord(1, c[1]))));
  }
  CHECK(worst <= 1e-8);

  // geometric decay of the interface change
  const auto& d = res.interface_delta;
  REQUIRE(d.size() >= 4);
  for (size_t t = 3; t < d.size(); ++t) CHECK(d[t] < d[t - 1]);
  CHECK(d.back() <= opts.tol);
}

TEST_CASE("elliptic iteration agrees with the direct solve") {
  const Grid g = Grid::rect(0, 1, 24, 0, 1, 24);
  const MediaField media = media_preset("fig5", 0.0625);
  const Partition part = build_partition(g, {2, 2}, 6);
  const PatchSystem sys = build_elliptic_system(part, media);
  const Vector phi =
      elliptic_phi(g, [](double x, double y) { return std::sin(3.0 * x) + y; });

  LocalEllipticSolver full(g, whole_box(g), media);
  const Vector ref = full.solve_dirichlet(phi);

  SchwarzOptions opts;
  opts.tol = 1e-8;
  opts.t_max = 400;
  const SchwarzResult res = schwarz_solve(sys, phi, opts, &ref);
  CHECK(res.converged);
  CHECK(rel_l2(res.u_global, ref) <= 10.0 * opts.tol);
  REQUIRE(!res.rel_error.empty());
  CHECK(res.rel_error.back() <= 10.0 * opts.tol);
  CHECK(res.iteration_solves == (long)sys.locals.size() * res.iterations);
  CHECK(res.final_solves == (long)sys.locals.size());

  // truncating the sweep budget reports, not throws
  SchwarzOptions tight = opts;
  tight.t_max = 3;
  const SchwarzResult cut = schwarz_solve(sys, phi, tight);
  CHECK(!cut.converged);
  CHECK(cut.iterations == 3);
}

TEST_CASE("transport iteration agrees with the direct solve") {
  const Grid g = Grid::line(0, 1, 60);
  const CollisionKernel kern = heterogeneous_two_scale(1.0 / 81.0, 1.0 / 9.0);
  const OrdinateSet ords = gauss_legendre(8);
  const Partition part = build_partition(g, {3, 1}, 4);
  const PatchSystem sys = build_rte_system(part, kern, ords);

  const Vector phi = rte_phi(ords, [](int side, double v) {
    return side == 0 ? 1.0 + 0.2 * v : 0.3;
  });
  LocalRteSolver full(g, whole_box(g), kern, ords);
  const Vector ref = full.solve_transport(phi);

  SchwarzOptions opts;
  opts.tol = 1e-8;
  opts.t_max = 200;
  const SchwarzResult res = schwarz_solve(sys, phi, opts, &ref);
  CHECK(res.converged);
  CHECK(rel_l2(res.u_global, ref) <= 1e-3);
  CHECK(rel_l2(res.u_global, ref) <= 10.0 * opts.tol);
}

TEST_CASE("compressed maps are orthonormal factorizations") {
  const Grid g = Grid::rect(0, 1, 14, 0, 1, 14);
  const Partition part = build_partition(g, {2, 2}, 4);
  const PatchSystem sys = build_elliptic_system(part, media_preset("fig5", 0.25));

  const std::vector<ReducedMap> maps = compress_all(sys, 8, 4, 123);
  REQUIRE(maps.size() == sys.locals.size());
  for (const ReducedMap& m : maps) {
    const int k = m.r + m.p;
    REQUIRE(m.f.U.cols() == k);
    REQUIRE(m.f.V.cols() == k);
    CHECK((m.f.U.transpose() * m.f.U - DenseMatrix::Identity(k, k)).norm() <= 1e-10);
    CHECK((m.f.V.transpose() * m.f.V - DenseMatrix::Identity(k, k)).norm() <= 1e-10);
    for (int i = 1; i < k; ++i) CHECK(m.f.S(i) <= m.f.S(i - 1) + 1e-15);
  }

  // distinct seeds per patch: sketches differ
  CHECK((maps[0].f.V - maps[1].f.V).norm() > 1e-6);
}

TEST_CASE("full rank compression reproduces the vanilla trajectory") {
  const Grid g = Grid::rect(0, 1, 12, 0, 1, 12);
  const Partition part = build_partition(g, {2, 1}, 4);
  const PatchSystem sys = build_elliptic_system(part, media_preset("fig5", 0.25));
  const Vector phi =
      elliptic_phi(g, [](double x, double y) { return std::cos(2.0 * x) * (1 + y); });

  int full_rank = sys.locals[0].n_boundary;
  for (const PatchLocal& L : sys.locals)
    full_rank = std::min({full_rank, L.n_boundary, L.n_target});
  const std::vector<ReducedMap> maps = compress_all(sys, full_rank - 2, 2, 5);

  SchwarzOptions opts;
  opts.tol = 1e-9;
  opts.record_interfaces = true;
  const SchwarzResult vanilla = schwarz_solve(sys, phi, opts);
  const SchwarzResult reduced = reduced_schwarz_solve(sys, maps, phi, opts);

  CHECK(reduced.converged);
  CHECK(reduced.iterations == vanilla.iterations);
  REQUIRE(reduced.interfaces.size() == vanilla.interfaces.size());
  for (size_t t = 0; t < vanilla.interfaces.size(); ++t)
    for (size_t m = 0; m < sys.locals.size(); ++m)
      CHECK((reduced.interfaces[t][m] - vanilla.interfaces[t][m])
                .lpNorm<Eigen::Infinity>() <= 1e-8);
  CHECK(rel_l2(reduced.u_global, vanilla.u_global) <= 1e-8);
}

TEST_CASE("reduced online stage spends no fine solves in the loop") {
  const Grid g = Grid::rect(0, 1, 12, 0, 1, 12);
  const Partition part = build_partition(g, {2, 2}, 4);
  const PatchSystem sys = build_elliptic_system(part, media_preset("fig7", 0.25));
  const Vector phi = elliptic_phi(g, [](double x, double y) { return x + y; });

  const std::vector<ReducedMap> maps = compress_all(sys, 10, 4, 77);
  // 14 probe solves plus 14 adjoint solves per patch
  const long offline = sys.total_fine_solves();
  CHECK(offline == (long)sys.locals.size() * 28);

  SchwarzOptions opts;
  const SchwarzResult res = reduced_schwarz_solve(sys, maps, phi, opts);
  CHECK(res.iteration_solves == 0);
  CHECK(res.final_solves == (long)sys.locals.size());
  CHECK(sys.total_fine_solves() == offline + (long)sys.locals.size());
}

TEST_CASE("stagnation floor is nonincreasing in the kept rank") {
  const Grid g = Grid::rect(0, 1, 20, 0, 1, 20);
  const MediaField media = media_preset("fig7", 0.0625);
  const Partition part = build_partition(g, {2, 2}, 4);
  const PatchSystem sys = build_elliptic_system(part, media);
  const Vector phi = elliptic_phi(
      g, [](double x, double y) { return std::sin(2.0 * x) + std::cos(y); });

  LocalEllipticSolver full(g, whole_box(g), media);
  const Vector ref = full.solve_dirichlet(phi);

  int full_rank = sys.locals[0].n_boundary;
  for (const PatchLocal& L : sys.locals)
    full_rank = std::min({full_rank, L.n_boundary, L.n_target});

  SchwarzOptions opts;
  opts.tol = 1e-13;
  opts.t_max = 80;
  std::vector<double> floors;
  for (int r : {5, 10, 20, full_rank - 4}) {
    const std::vector<ReducedMap> maps = compress_all(sys, r, 4, 31);
    const SchwarzResult res = reduced_schwarz_solve(sys, maps, phi, opts, &ref);
    REQUIRE(!res.rel_error.empty());
    double floor = res.rel_error[0];
    for (double e : res.rel_error) floor = std::min(floor, e);
    floors.push_back(floor);
  }
  for (size_t i = 1; i < floors.size(); ++i)
    CHECK(floors[i] <= floors[i - 1] * 1.01 + 1e-14);
  CHECK(floors.front() > 1e3 * floors.back());
}

TEST_CASE("transport map compresses to a handful of modes") {
  // interior patch, overlap buffer several mean free paths wide: only the
  // smooth diffusive modes survive transit, so the confined map is low rank
  const Grid g = Grid::line(0, 1, 96);
  const CollisionKernel iso = isotropic_kernel(0.0625, 1.0);
  const OrdinateSet ords = gauss_legendre(8);
  const Partition part = build_partition(g, {3, 1}, 16);
  const PatchSystem sys = build_rte_system(part, iso, ords);

  const DenseMatrix s = dense_confined(sys.locals[1]);
  Eigen::JacobiSVD<DenseMatrix> svd(s);
  const Vector sv = svd.singularValues();
  REQUIRE(sv.size() == 8);
  CHECK(sv(6) <= 1e-2 * sv(0));

  const ReducedMap m = compress_local_operator(sys.locals[1], 4, 2, 99);
  const DenseMatrix approx = m.f.U * m.f.S.asDiagonal() * m.f.V.transpose();
  Eigen::JacobiSVD<DenseMatrix> dsvd(s - approx);
  CHECK(dsvd.singularValues()(0) <= 1e-2 * sv(0));
}

TEST_CASE("rank guards") {
  const Grid g = Grid::rect(0, 1, 10, 0, 1, 10);
  const Partition part = build_partition(g, {2, 1}, 2);
  const PatchSystem sys = build_elliptic_system(part, media_preset("constant", 1.0));

  CHECK_THROWS_AS(compress_local_operator(sys.locals[0], 0, 0, 1),
                  std::invalid_argument);
  const int big = std::min(sys.locals[0].n_boundary, sys.locals[0].n_target);
  CHECK_THROWS_AS(compress_local_operator(sys.locals[0], big, 4, 1),
                  std::invalid_argument);

  const Vector phi = elliptic_phi(g, [](double, double) { return 1.0; });
  std::vector<ReducedMap> maps = compress_all(sys, 4, 2, 1);
  std::swap(maps[0], maps[1]);
  CHECK_THROWS_AS(reduced_schwarz_solve(sys, maps, phi, SchwarzOptions{}),
                  std::invalid_argument);
  maps.pop_back();
  CHECK_THROWS_AS(reduced_schwarz_solve(sys, maps, phi, SchwarzOptions{}),
                  std::invalid_argument);
}

TEST_CASE("reduced maps persist and refuse foreign specs") {
  const Grid g = Grid::rect(0, 1, 10, 0, 1, 10);
  const Partition part = build_partition(g, {2, 1}, 2);
  const PatchSystem sys = build_elliptic_system(part, media_preset("fig5", 0.25));
  const std::vector<ReducedMap> maps = compress_all(sys, 6, 3, 42);

  nlohmann::json spec = {{"family", "elliptic"},
                         {"media", "fig5"},
                         {"epsilon", 0.25},
                         {"cells", {10, 10}},
                         {"patches", {2, 1}},
                         {"overlap", 2}};
  TempDir dir("maps");
  save_reduced_maps(dir.path.string(), maps, spec);
  CHECK(std::filesystem::exists(dir.path / "manifest.json"));
  CHECK(std::filesystem::exists(dir.path / "U_0.csv"));
  CHECK(std::filesystem::exists(dir.path / "S_1.csv"));

  const std::vector<ReducedMap> back = load_reduced_maps(dir.path.string(), spec);
  REQUIRE(back.size() == maps.size());
  for (size_t m = 0; m < maps.size(); ++m) {
    CHECK(back[m].patch_id == maps[m].patch_id);
    CHECK(back[m].r == maps[m].r);
    CHECK(back[m].p == maps[m].p);
    CHECK(back[m].seed == maps[m].seed);
    CHECK((back[m].f.U - maps[m].f.U).norm() == 0.0);
    CHECK((back[m].f.S - maps[m].f.S).norm() == 0.0);
    CHECK((back[m].f.V - maps[m].f.V).norm() == 0.0);
  }

  nlohmann::json other = spec;
  other["epsilon"] = 0.5;
  CHECK_THROWS_WITH_AS(load_reduced_maps(dir.path.string(), other),
                       doctest::Contains("mismatched problem spec"),
                       std::runtime_error);
}
