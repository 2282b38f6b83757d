#include "mspde/cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <Eigen/Core>

#include "mspde/basis/basis.hpp"
#include "mspde/elliptic/solver.hpp"
#include "mspde/io/csv.hpp"
#include "mspde/linalg/operator_handle.hpp"
#include "mspde/linalg/ops.hpp"
#include "mspde/linalg/rng.hpp"
#include "mspde/manifold/manifold.hpp"
#include "mspde/schwarz/reduced.hpp"
#include "mspde/schwarz/schwarz.hpp"

namespace mspde {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double s() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

struct RunContext {
  const Config& c;
  fs::path dir;
  json report;
  Timer total;

  explicit RunContext(const Config& cfg) : c(cfg), dir(cfg.output_dir) {
    fs::create_directories(dir);
    report["schema_version"] = 1;
    report["config"] = cfg.raw;
    report["spec"] = problem_spec(cfg);
    report["flags"] = json::array();
    report["metrics"] = json::object();
    report["counters"] = json::object();
    report["timings"] = {{"offline_s", 0.0}, {"online_s", 0.0}};
    report["artifacts"] = json::array();
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }
  void artifact(const std::string& name) { report["artifacts"].push_back(name); }
  void flag(const std::string& f) { report["flags"].push_back(f); }
};

double rel_l2(const Vector& got, const Vector& ref) {
  const double n = ref.norm();
  const double d = (got - ref).norm();
  return n > 0.0 ? d / n : d;
}

double rel_sup(const Vector& got, const Vector& ref) {
  const double n = ref.lpNorm<Eigen::Infinity>();
  const double d = (got - ref).lpNorm<Eigen::Infinity>();
  return n > 0.0 ? d / n : d;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Box whole_box(const Grid& g) {
  Box b;
  b.hi = {g.ax[0].cells, g.dim == 2 ? g.ax[1].cells : 0};
  return b;
}

CollisionKernel make_kernel(const Config& c) {
  if (c.kernel_kind == "isotropic_diffusive")
    return isotropic_kernel(c.kernel_epsilon, c.sigma);
  if (c.kernel_kind == "heterogeneous")
    return heterogeneous_two_scale(c.eps1, c.eps2);
  return henyey_greenstein_kernel(c.kernel_epsilon, c.hg_g);
}

void write_grid_solution(RunContext& rc, const Grid& g, const Vector& u) {
  const long n = g.node_count();
  if (g.dim == 2) {
    DenseMatrix rows(n, 3);
    for (long id = 0; id < n; ++id) {
      const auto xy = g.node_coords(id);
      rows(id, 0) = g.coord(0, xy[0]);
      rows(id, 1) = g.coord(1, xy[1]);
      rows(id, 2) = u(id);
    }
    write_table_csv(rc.path("solution.csv"), {"x1", "x2", "value"}, rows);
  } else {
    DenseMatrix rows(n, 2);
    for (long id = 0; id < n; ++id) {
      rows(id, 0) = g.coord(0, (int)id);
      rows(id, 1) = u(id);
    }
    write_table_csv(rc.path("solution.csv"), {"x", "value"}, rows);
  }
  rc.artifact("solution.csv");
}

void write_rte_solution(RunContext& rc, const Grid& g, const OrdinateSet& ords,
                        const Vector& u) {
  const long nx = g.node_count();
  const int nv = ords.size();
  DenseMatrix rows(nx * nv, 3);
  for (long xi = 0; xi < nx; ++xi)
    for (int j = 0; j < nv; ++j) {
      const long r = xi * nv + j;
      rows(r, 0) = g.coord(0, (int)xi);
      rows(r, 1) = ords.v(j);
      rows(r, 2) = u(r);
    }
  write_table_csv(rc.path("solution.csv"), {"x", "v", "value"}, rows);
  rc.artifact("solution.csv");

  DenseMatrix avg(nx, 2);
  for (long xi = 0; xi < nx; ++xi) {
    avg(xi, 0) = g.coord(0, (int)xi);
    avg(xi, 1) = 0.5 * ords.w.dot(u.segment(xi * nv, nv));
  }
  write_table_csv(rc.path("velocity_average.csv"), {"x", "average"}, avg);
  rc.artifact("velocity_average.csv");
}

void write_errhist(RunContext& rc, const SchwarzResult& res) {
  const bool with_ref = res.rel_error.size() == res.interface_delta.size() &&
                        !res.rel_error.empty();
  DenseMatrix rows((Eigen::Index)res.interface_delta.size(), with_ref ? 3 : 2);
  for (std::size_t i = 0; i < res.interface_delta.size(); ++i) {
    rows((Eigen::Index)i, 0) = (double)(i + 1);
    rows((Eigen::Index)i, 1) = res.interface_delta[i];
    if (with_ref) rows((Eigen::Index)i, 2) = res.rel_error[i];
  }
  std::vector<std::string> header = {"t", "delta"};
  if (with_ref) header.push_back("rel_error");
  write_table_csv(rc.path("errhist.csv"), header, rows);
  rc.artifact("errhist.csv");
}

void write_partition(RunContext& rc, const Partition& part) {
  std::ofstream out(rc.path("partition.json"));
  if (!out) throw std::runtime_error("cannot open partition.json for writing");
  out << partition_to_json(part).dump(2) << "\n";
  rc.artifact("partition.json");
}

void write_singvals(RunContext& rc, int patch_id, const Vector& s) {
  DenseMatrix rows(s.size(), 2);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    rows(i, 0) = (double)(i + 1);
    rows(i, 1) = s(i);
  }
  const std::string name = "singvals_" + std::to_string(patch_id) + ".csv";
  write_table_csv(rc.path(name), {"i", "sigma"}, rows);
  rc.artifact(name);
}

// The partitioned pipelines share problem assembly and the direct-reference
// solve; ords is only populated for transport.
struct BuiltSystem {
  Grid grid;
  Partition part;
  PatchSystem sys;
  Vector phi;
  OrdinateSet ords;
  std::function<Vector()> direct;
};

BuiltSystem build_system(const Config& c) {
  BuiltSystem b;
  b.grid = make_grid(c);
  std::array<int, 2> counts = c.patch_counts;
  if (b.grid.dim == 1) counts[1] = 1;
  b.part = build_partition(b.grid, counts, c.overlap);
  const Grid g = b.grid;
  if (c.family == "elliptic") {
    const MediaField media = media_preset(c.media_preset, c.epsilon);
    b.sys = build_elliptic_system(b.part, media);
    b.phi = make_elliptic_phi(c, g);
    const Vector phi = b.phi;
    b.direct = [g, media, phi]() {
      LocalEllipticSolver full(g, whole_box(g), media);
      return full.solve_dirichlet(phi);
    };
  } else {
    b.ords = gauss_legendre(c.ordinates);
    const CollisionKernel kern = make_kernel(c);
    b.sys = build_rte_system(b.part, kern, b.ords);
    b.phi = make_rte_phi(c, b.ords);
    const Vector phi = b.phi;
    const OrdinateSet ords = b.ords;
    b.direct = [g, kern, ords, phi]() {
      LocalRteSolver full(g, whole_box(g), kern, ords);
      return full.solve_transport(phi);
    };
  }
  return b;
}

void write_system_solution(RunContext& rc, const BuiltSystem& b, const Vector& u) {
  if (rc.c.family == "elliptic")
    write_grid_solution(rc, b.grid, u);
  else
    write_rte_solution(rc, b.grid, b.ords, u);
}

void record_reference_errors(RunContext& rc, const Vector& got, const Vector& ref) {
  rc.report["metrics"]["rel_l2_vs_direct"] = rel_l2(got, ref);
  rc.report["metrics"]["rel_sup_vs_direct"] = rel_sup(got, ref);
}

void record_schwarz_result(RunContext& rc, const BuiltSystem& b,
                           const SchwarzResult& res, const Vector* ref) {
  write_system_solution(rc, b, res.u_global);
  write_errhist(rc, res);
  rc.report["metrics"]["iterations"] = res.iterations;
  rc.report["metrics"]["converged"] = res.converged;
  if (!res.interface_delta.empty())
    rc.report["metrics"]["final_delta"] = res.interface_delta.back();
  if (!res.converged) rc.flag("not_converged");
  rc.report["counters"]["iteration_solves"] = res.iteration_solves;
  rc.report["counters"]["final_solves"] = res.final_solves;
  if (ref) record_reference_errors(rc, res.u_global, *ref);
}

void run_direct(RunContext& rc) {
  const Config& c = rc.c;
  const Grid g = make_grid(c);
  Timer online;
  if (c.family == "elliptic") {
    const MediaField media = media_preset(c.media_preset, c.epsilon);
    LocalEllipticSolver full(g, whole_box(g), media);
    const Vector phi = make_elliptic_phi(c, g);
    const Vector u =
        full.solve_dirichlet(phi, Vector::Constant(full.n_interior(), c.source));
    rc.report["timings"]["online_s"] = online.s();
    write_grid_solution(rc, g, u);
    rc.report["counters"]["fine_solves"] = full.solve_count();
    rc.report["metrics"]["value_min"] = u.minCoeff();
    rc.report["metrics"]["value_max"] = u.maxCoeff();
  } else if (c.family == "rte") {
    const OrdinateSet ords = gauss_legendre(c.ordinates);
    const CollisionKernel kern = make_kernel(c);
    LocalRteSolver full(g, whole_box(g), kern, ords);
    const Vector phi = make_rte_phi(c, ords);
    const Vector u =
        full.solve_transport(phi, Vector::Constant(full.n_full(), c.source));
    rc.report["timings"]["online_s"] = online.s();
    write_rte_solution(rc, g, ords, u);
    rc.report["counters"]["fine_solves"] = full.solve_count();
    rc.report["metrics"]["value_min"] = u.minCoeff();
    rc.report["metrics"]["value_max"] = u.maxCoeff();
  } else {
    const MediaField media = media_preset(c.media_preset, c.epsilon);
    const NonlinearProblem prob = semilinear_preset(g, media);
    const Vector f = Vector::Constant(prob.dim_f, c.source);
    bool ok = false;
    const Vector u =
        newton_solve(prob, f, Vector::Zero(prob.dim_u), NewtonOptions{}, &ok);
    rc.report["timings"]["online_s"] = online.s();
    if (!ok) rc.flag("newton_not_converged");
    Vector ug = Vector::Zero(g.node_count());
    ug.segment(1, prob.dim_u) = u;
    write_grid_solution(rc, g, ug);
    rc.report["metrics"]["value_min"] = ug.minCoeff();
    rc.report["metrics"]["value_max"] = ug.maxCoeff();
  }
}

void run_schwarz(RunContext& rc) {
  BuiltSystem b = build_system(rc.c);
  write_partition(rc, b.part);
  Vector ref;
  const Vector* refp = nullptr;
  if (rc.c.compare_to_direct) {
    ref = b.direct();
    refp = &ref;
  }
  SchwarzOptions opts;
  opts.tol = rc.c.tol;
  opts.t_max = rc.c.t_max;
  Timer online;
  const SchwarzResult res = schwarz_solve(b.sys, b.phi, opts, refp);
  rc.report["timings"]["online_s"] = online.s();
  record_schwarz_result(rc, b, res, refp);
}

void run_reduced_schwarz(RunContext& rc) {
  const Config& c = rc.c;
  BuiltSystem b = build_system(c);
  write_partition(rc, b.part);
  Timer offline;
  const std::vector<ReducedMap> maps = compress_all(b.sys, c.r, c.p, c.seed);
  rc.report["timings"]["offline_s"] = offline.s();
  save_reduced_maps(rc.path("maps"), maps, problem_spec(c));
  rc.artifact("maps/manifest.json");
  for (const ReducedMap& m : maps) write_singvals(rc, m.patch_id, m.f.S);
  rc.report["counters"]["offline_fine_solves"] = b.sys.total_fine_solves();

  Vector ref;
  const Vector* refp = nullptr;
  if (c.compare_to_direct) {
    ref = b.direct();
    refp = &ref;
  }
  SchwarzOptions opts;
  opts.tol = c.tol;
  opts.t_max = c.t_max;
  Timer online;
  const SchwarzResult res = reduced_schwarz_solve(b.sys, maps, b.phi, opts, refp);
  rc.report["timings"]["online_s"] = online.s();
  record_schwarz_result(rc, b, res, refp);
  rc.report["metrics"]["map_rank"] = c.r + c.p;
}

void run_basis(RunContext& rc) {
  const Config& c = rc.c;
  BuiltSystem b = build_system(c);
  write_partition(rc, b.part);
  Timer offline;
  std::vector<LocalBasis> bases;
  bases.reserve(b.part.patches.size());
  for (const Patch& p : b.part.patches) {
    if (c.basis_kind == "full")
      bases.push_back(offline_full_basis(b.sys, p.id));
    else
      bases.push_back(
          offline_random_basis(b.sys, p.id, c.k, derive_seed(c.seed, "basis", p.id)));
  }
  rc.report["timings"]["offline_s"] = offline.s();
  save_bases(rc.path("bases"), bases, problem_spec(c));
  rc.artifact("bases/manifest.json");
  rc.report["counters"]["offline_fine_solves"] = b.sys.total_fine_solves();

  AssembleOptions aopts;
  aopts.boundary_weight = c.boundary_weight;
  Timer online;
  const AssembleResult ar = online_assemble(b.sys, bases, b.phi, aopts);
  rc.report["timings"]["online_s"] = online.s();
  write_system_solution(rc, b, ar.u_global);
  rc.report["metrics"]["rank"] = ar.rank;
  rc.report["metrics"]["residual"] = ar.residual;
  if (ar.underdetermined) rc.flag("underdetermined_basis");
  if (c.compare_to_direct) record_reference_errors(rc, ar.u_global, b.direct());
}

void run_manifold(RunContext& rc) {
  const Config& c = rc.c;
  const Grid g = make_grid(c);
  const MediaField media = media_preset(c.media_preset, c.epsilon);
  const NonlinearProblem prob = semilinear_preset(g, media);
  const Sampler sampler = sine_mode_sampler(g, c.modes, c.amplitude);

  Timer offline;
  const SampleCloud cloud = offline_sample(prob, c.samples, sampler, c.seed, "sine_modes");
  const DimProbe probe = local_dimension_probe(cloud, c.probe_center, c.probe_radius_frac);
  rc.report["timings"]["offline_s"] = offline.s();
  save_cloud(rc.path("cloud"), cloud, problem_spec(c));
  rc.artifact("cloud/manifest.json");
  write_singvals(rc, c.probe_center, probe.spectrum);
  rc.report["metrics"]["probe_dim"] = probe.dim;
  rc.report["metrics"]["probe_members"] = probe.members;

  DenseMatrix qrows(c.queries, 2);
  std::vector<double> errs;
  errs.reserve(c.queries);
  double online_s = 0.0;
  for (int q = 0; q < c.queries; ++q) {
    const Vector f = sampler(derive_seed(c.seed, "query", (std::uint64_t)q));
    bool ok = false;
    const Vector u_true =
        newton_solve(prob, f, Vector::Zero(prob.dim_u), NewtonOptions{}, &ok);
    if (!ok) throw std::runtime_error("query oracle failed to converge");
    Timer t1;
    const Vector u_hat = online_interpolate(cloud, f, c.knn_k);
    online_s += t1.s();
    const double e = rel_l2(u_hat, u_true);
    errs.push_back(e);
    qrows(q, 0) = (double)q;
    qrows(q, 1) = e;
  }
  rc.report["timings"]["online_s"] = online_s;
  write_table_csv(rc.path("queries.csv"), {"query", "rel_l2"}, qrows);
  rc.artifact("queries.csv");
  rc.report["metrics"]["median_rel_l2"] = median_of(errs);
  rc.report["metrics"]["max_rel_l2"] = *std::max_element(errs.begin(), errs.end());
}

void run_svd_bench(RunContext& rc) {
  const Config& c = rc.c;
  const int n = std::min(c.bench_rows, c.bench_cols);
  Vector sigma(n);
  for (int i = 0; i < n; ++i) sigma(i) = std::pow(2.0, -(double)(i + 1));
  const DenseMatrix u = qr_orthonormalize(
      gaussian_matrix(c.bench_rows, n, derive_seed(c.seed, "bench_u")));
  const DenseMatrix v = qr_orthonormalize(
      gaussian_matrix(c.bench_cols, n, derive_seed(c.seed, "bench_v")));
  const DenseMatrix a = u * sigma.asDiagonal() * v.transpose();
  const OperatorHandle op = dense_operator(a);
  const double bound = (double)c.r / (double)(c.p - 1) * sigma(c.r);

  write_singvals(rc, 0, sigma);
  Timer online;
  DenseMatrix rows(c.trials, 3);
  int within = 0;
  double max_err = 0.0;
  for (int t = 0; t < c.trials; ++t) {
    const SvdTriple f =
        randomized_svd(op, c.r, c.p, derive_seed(c.seed, "bench_trial", (std::uint64_t)t));
    const DenseMatrix resid = a - f.U * f.S.asDiagonal() * f.V.transpose();
    const double err = thin_svd(resid).S(0);
    rows(t, 0) = (double)t;
    rows(t, 1) = err;
    rows(t, 2) = bound;
    max_err = std::max(max_err, err);
    if (err <= 10.0 * bound) ++within;
  }
  rc.report["timings"]["online_s"] = online.s();
  write_table_csv(rc.path("errors.csv"), {"trial", "spectral_error", "bound"}, rows);
  rc.artifact("errors.csv");
  rc.report["metrics"]["bound"] = bound;
  rc.report["metrics"]["max_spectral_error"] = max_err;
  rc.report["metrics"]["trials_within_10x"] = within;
  rc.report["metrics"]["trials"] = c.trials;
}

}  // namespace

json run_config(const Config& c) {
  RunContext rc(c);
  if (const char* t = std::getenv("MSPDE_THREADS")) {
    const int n = std::atoi(t);
    if (n > 0) Eigen::setNbThreads(n);
  }
  rc.report["threads"] = Eigen::nbThreads();
  try {
    if (c.method == "direct")
      run_direct(rc);
    else if (c.method == "schwarz")
      run_schwarz(rc);
    else if (c.method == "reduced_schwarz")
      run_reduced_schwarz(rc);
    else if (c.method == "basis")
      run_basis(rc);
    else if (c.method == "manifold")
      run_manifold(rc);
    else
      run_svd_bench(rc);
    for (const auto& a : rc.report["artifacts"])
      if (!fs::exists(rc.dir / a.get<std::string>()))
        throw std::runtime_error("missing artifact " + a.get<std::string>());
    rc.report["status"] = "ok";
  } catch (const std::exception& e) {
    rc.report["status"] = "failed";
    rc.report["error"] = e.what();
    rc.flag("partial_artifacts");
    json kept = json::array();
    for (const auto& a : rc.report["artifacts"])
      if (fs::exists(rc.dir / a.get<std::string>())) kept.push_back(a);
    rc.report["artifacts"] = kept;
  }
  rc.report["timings"]["total_s"] = rc.total.s();
  std::ofstream out(rc.path("report.json"));
  out << rc.report.dump(2) << "\n";
  return rc.report;
}

json compare_runs(const std::string& dir_a, const std::string& dir_b) {
  auto load_report = [](const fs::path& dir) {
    std::ifstream in(dir / "report.json");
    if (!in)
      throw std::runtime_error("compare: cannot open " + (dir / "report.json").string());
    json j;
    in >> j;
    return j;
  };
  auto has_artifact = [](const json& r, const std::string& name) {
    if (!r.contains("artifacts")) return false;
    for (const auto& a : r["artifacts"])
      if (a.get<std::string>() == name) return true;
    return false;
  };
  const fs::path pa(dir_a), pb(dir_b);
  const json ra = load_report(pa), rb = load_report(pb);
  const json sa = ra.value("spec", json::object());
  const json sb = rb.value("spec", json::object());
  if (sa.value("family", "") != sb.value("family", "") ||
      sa.value("grid", json()) != sb.value("grid", json()) ||
      sa.value("ordinates", json()) != sb.value("ordinates", json()))
    throw std::runtime_error("compare: incompatible grids");

  json out;
  out["run_a"] = dir_a;
  out["run_b"] = dir_b;
  if (has_artifact(ra, "solution.csv") && has_artifact(rb, "solution.csv")) {
    const DenseMatrix ma = read_table_csv((pa / "solution.csv").string());
    const DenseMatrix mb = read_table_csv((pb / "solution.csv").string());
    if (ma.rows() != mb.rows() || ma.cols() != mb.cols())
      throw std::runtime_error("compare: incompatible grids");
    const Vector va = ma.col(ma.cols() - 1);
    const Vector vb = mb.col(mb.cols() - 1);
    const double scale2 = std::max(va.norm(), vb.norm());
    const double scalei =
        std::max(va.lpNorm<Eigen::Infinity>(), vb.lpNorm<Eigen::Infinity>());
    const double d2 = (va - vb).norm();
    const double di = (va - vb).lpNorm<Eigen::Infinity>();
    out["solution"]["rel_l2"] = scale2 > 0.0 ? d2 / scale2 : d2;
    out["solution"]["rel_sup"] = scalei > 0.0 ? di / scalei : di;
  }
  if (has_artifact(ra, "errhist.csv") && has_artifact(rb, "errhist.csv")) {
    const DenseMatrix ha = read_table_csv((pa / "errhist.csv").string());
    const DenseMatrix hb = read_table_csv((pb / "errhist.csv").string());
    const Eigen::Index n = std::min(ha.rows(), hb.rows());
    double sup = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      sup = std::max(sup, std::abs(ha(i, 1) - hb(i, 1)));
    out["errhist"]["sup_delta_diff"] = sup;
    out["errhist"]["length_a"] = ha.rows();
    out["errhist"]["length_b"] = hb.rows();
  }
  json timings;
  for (const char* key : {"offline_s", "online_s", "total_s"}) {
    const double ta = ra.value("timings", json::object()).value(key, 0.0);
    const double tb = rb.value("timings", json::object()).value(key, 0.0);
    timings[std::string(key) + "_a"] = ta;
    timings[std::string(key) + "_b"] = tb;
    if (tb > 0.0) timings[std::string(key) + "_ratio"] = ta / tb;
  }
  out["timings"] = timings;
  return out;
}

}  // namespace mspde
