#include "mspde/manifold/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <Eigen/SparseLU>
#include <json.hpp>

#include "mspde/io/csv.hpp"
#include "mspde/linalg/ops.hpp"
#include "mspde/linalg/rng.hpp"

namespace mspde {

Vector newton_solve(const NonlinearProblem& prob, const Vector& f,
                    const Vector& u0, const NewtonOptions& opts, bool* ok) {
  if (ok) *ok = false;
  Vector u = u0;
  double rnorm = prob.residual(u, f).norm();
  const double target = std::max(opts.tol_abs, opts.tol_rel * rnorm);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (rnorm <= target) {
      if (ok) *ok = true;
      return u;
    }
    Eigen::SparseLU<SparseMatrix> lu(prob.jacobian(u));
    if (lu.info() != Eigen::Success) return u;
    const Vector step = lu.solve(-prob.residual(u, f));
    double s = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtrack; ++bt) {
      const Vector trial = u + s * step;
      const double tn = prob.residual(trial, f).norm();
      if (tn < rnorm) {
        u = trial;
        rnorm = tn;
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) return u;
  }
  if (rnorm <= target && ok) *ok = true;
  return u;
}

NonlinearProblem semilinear_preset(const Grid& grid1d,
                                   const MediaField& media) {
  if (grid1d.dim != 1)
    throw std::invalid_argument("semilinear_preset: needs a 1D grid");
  const int n = grid1d.nodes(0) - 2;
  if (n < 1)
    throw std::invalid_argument("semilinear_preset: grid has no interior nodes");
  const double h = grid1d.ax[0].h();

  // harmonic face coefficients of the linear part, assembled once
  Vector a_node(n + 2);
  for (int i = 0; i < n + 2; ++i) {
    const double v = media.a(grid1d.coord(0, i), 0.0);
    if (!(v > 0.0))
      throw std::invalid_argument("semilinear_preset: media must be positive");
    a_node(i) = v;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < n; ++i) {
    const double al = 2.0 / (1.0 / a_node(i) + 1.0 / a_node(i + 1));
    const double ar = 2.0 / (1.0 / a_node(i + 1) + 1.0 / a_node(i + 2));
    trip.emplace_back(i, i, (al + ar) / (h * h));
    if (i > 0) trip.emplace_back(i, i - 1, -al / (h * h));
    if (i + 1 < n) trip.emplace_back(i, i + 1, -ar / (h * h));
  }
  auto a = std::make_shared<SparseMatrix>(n, n);
  a->setFromTriplets(trip.begin(), trip.end());

  NonlinearProblem prob;
  prob.dim_f = n;
  prob.dim_u = n;
  prob.residual = [a](const Vector& u, const Vector& f) -> Vector {
    return (*a) * u + u.array().cube().matrix() - f;
  };
  prob.jacobian = [a, n](const Vector& u) -> SparseMatrix {
    SparseMatrix j = *a;
    for (int i = 0; i < n; ++i) j.coeffRef(i, i) += 3.0 * u(i) * u(i);
    return j;
  };
  return prob;
}

NonlinearProblem linear_problem(SparseMatrix a) {
  const int n = (int)a.rows();
  auto m = std::make_shared<SparseMatrix>(std::move(a));
  NonlinearProblem prob;
  prob.dim_f = n;
  prob.dim_u = n;
  prob.residual = [m](const Vector& u, const Vector& f) -> Vector {
    return (*m) * u - f;
  };
  prob.jacobian = [m](const Vector&) { return *m; };
  return prob;
}

SampleCloud offline_sample(const NonlinearProblem& prob, int n,
                           const Sampler& sampler, std::uint64_t seed,
                           const std::string& sampler_label) {
  if (n < 1) throw std::invalid_argument("offline_sample: need n >= 1");
  SampleCloud cloud;
  cloud.seed = seed;
  cloud.sampler_label = sampler_label;
  cloud.f.resize(prob.dim_f, n);
  cloud.u.resize(prob.dim_u, n);
  const NewtonOptions nopts;
  const Vector u0 = Vector::Zero(prob.dim_u);
  for (int i = 0; i < n; ++i) {
    bool ok = false;
    for (int attempt = 0; attempt < 3 && !ok; ++attempt) {
      const Vector f = sampler(
          derive_seed(seed, "sample", (std::uint64_t)i * 8 + attempt));
      const Vector u = newton_solve(prob, f, u0, nopts, &ok);
      if (ok) {
        cloud.f.col(i) = f;
        cloud.u.col(i) = u;
      }
    }
    if (!ok)
      throw std::runtime_error("offline_sample: solve failed for sample " +
                               std::to_string(i) + " after 3 attempts");
  }
  return cloud;
}

Sampler sine_mode_sampler(const Grid& grid1d, int n_modes, double amplitude) {
  if (grid1d.dim != 1)
    throw std::invalid_argument("sine_mode_sampler: needs a 1D grid");
  if (n_modes < 1)
    throw std::invalid_argument("sine_mode_sampler: need at least one mode");
  const int n = grid1d.nodes(0) - 2;
  const double len = grid1d.ax[0].hi - grid1d.ax[0].lo;
  const double h = grid1d.ax[0].h();
  return [n, n_modes, amplitude, len, h](std::uint64_t draw_seed) {
    CounterRng rng(draw_seed);
    Vector c(n_modes);
    for (int m = 0; m < n_modes; ++m) c(m) = amplitude * rng.normal();
    Vector f = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
      const double t = (i + 1) * h / len;
      for (int m = 0; m < n_modes; ++m)
        f(i) += c(m) * std::sin((m + 1) * M_PI * t);
    }
    return f;
  };
}

std::vector<int> knn(const SampleCloud& cloud, const Vector& f, int k) {
  const int n = (int)cloud.f.cols();
  if (k < 1 || k > n)
    throw std::invalid_argument("knn: need 1 <= k <= sample count");
  if (f.size() != cloud.f.rows())
    throw std::invalid_argument("knn: query size mismatch");
  std::vector<std::pair<double, int>> d(n);
  for (int i = 0; i < n; ++i) d[i] = {(cloud.f.col(i) - f).norm(), i};
  std::sort(d.begin(), d.end());  // pair order breaks ties toward lower index
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = d[i].second;
  return idx;
}

Vector online_interpolate(const SampleCloud& cloud, const Vector& f, int k) {
  const auto idx = knn(cloud, f, k);
  const int i1 = idx[0];
  if (k == 1) return cloud.u.col(i1);
  DenseMatrix df(cloud.f.rows(), k - 1);
  DenseMatrix du(cloud.u.rows(), k - 1);
  for (int j = 1; j < k; ++j) {
    df.col(j - 1) = cloud.f.col(idx[j]) - cloud.f.col(i1);
    du.col(j - 1) = cloud.u.col(idx[j]) - cloud.u.col(i1);
  }
  Eigen::CompleteOrthogonalDecomposition<DenseMatrix> cod(df);
  const Vector c = cod.solve(f - cloud.f.col(i1));
  return cloud.u.col(i1) + du * c;
}

DimProbe local_dimension_probe(const SampleCloud& cloud, int center,
                               double radius_frac) {
  const int n = (int)cloud.f.cols();
  if (center < 0 || center >= n)
    throw std::invalid_argument("local_dimension_probe: bad center index");
  if (!(radius_frac > 0.0))
    throw std::invalid_argument("local_dimension_probe: radius must be positive");
  Vector dist(n);
  for (int i = 0; i < n; ++i)
    dist(i) = (cloud.f.col(i) - cloud.f.col(center)).norm();
  const double radius = radius_frac * dist.maxCoeff();
  std::vector<int> members;
  for (int i = 0; i < n; ++i)
    if (dist(i) <= radius) members.push_back(i);
  if ((int)members.size() < 5)
    throw std::runtime_error("local_dimension_probe: fewer than 5 points in radius");
  DenseMatrix du(cloud.u.rows(), (Eigen::Index)members.size());
  for (size_t j = 0; j < members.size(); ++j) du.col((Eigen::Index)j) = cloud.u.col(members[j]);
  const Vector mean = du.rowwise().mean();
  du.colwise() -= mean;
  DimProbe probe;
  probe.members = (int)members.size();
  probe.spectrum = thin_svd(du).S;
  probe.dim = numerical_rank(probe.spectrum, 0.05 * probe.spectrum(0));
  return probe;
}

void save_cloud(const std::string& dir, const SampleCloud& cloud,
                const nlohmann::json& spec) {
  std::filesystem::create_directories(dir);
  write_matrix_csv(dir + "/inputs.csv", cloud.f);
  write_matrix_csv(dir + "/outputs.csv", cloud.u);
  nlohmann::json manifest;
  manifest["schema_version"] = 1;
  manifest["type"] = "sample_cloud";
  manifest["spec"] = spec;
  manifest["seed"] = cloud.seed;
  manifest["sampler"] = cloud.sampler_label;
  manifest["count"] = (int)cloud.f.cols();
  std::ofstream out(dir + "/manifest.json");
  if (!out) throw std::runtime_error("cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

SampleCloud load_cloud(const std::string& dir,
                       const nlohmann::json& expected_spec) {
  std::ifstream in(dir + "/manifest.json");
  if (!in) throw std::runtime_error("cannot read manifest in " + dir);
  nlohmann::json manifest;
  in >> manifest;
  if (manifest.value("type", "") != "sample_cloud")
    throw std::runtime_error("not a sample cloud store: " + dir);
  if (manifest["spec"] != expected_spec)
    throw std::runtime_error("mismatched problem spec in " + dir);
  SampleCloud cloud;
  cloud.f = read_matrix_csv(dir + "/inputs.csv");
  cloud.u = read_matrix_csv(dir + "/outputs.csv");
  cloud.seed = manifest["seed"].get<std::uint64_t>();
  cloud.sampler_label = manifest.value("sampler", "");
  return cloud;
}

}  // namespace mspde
