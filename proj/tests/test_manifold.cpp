#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseLU>
#include <json.hpp>

#include "mspde/elliptic/media.hpp"
#include "mspde/linalg/ops.hpp"
#include "mspde/linalg/rng.hpp"
#include "mspde/manifold/manifold.hpp"
#include "mspde/partition/grid.hpp"

using namespace mspde;

namespace {

double rel_l2(const Vector& got, const Vector& want) {
  return (got - want).norm() / want.norm();
}

Vector interior_sine(const Grid& g, int mode) {
  const int n = g.nodes(0) - 2;
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = std::sin(mode * M_PI * g.coord(0, i + 1));
  return v;
}

Vector solve_to_tol(const NonlinearProblem& prob, const Vector& f) {
  bool ok = false;
  const Vector u =
      newton_solve(prob, f, Vector::Zero(prob.dim_u), NewtonOptions{}, &ok);
  REQUIRE(ok);
  return u;
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

TEST_CASE("newton recovers a manufactured semilinear solution") {
  const Grid g = Grid::line(0, 1, 64);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("periodic_1d", 0.25));
  REQUIRE(prob.dim_u == 63);

  // forcing computed by pushing the target through the discrete operator
  const Vector u_star = interior_sine(g, 1);
  const Vector f = prob.residual(u_star, Vector::Zero(prob.dim_u));

  bool ok = false;
  const Vector u = newton_solve(prob, f, Vector::Zero(prob.dim_u),
                                NewtonOptions{}, &ok);
  CHECK(ok);
  CHECK(rel_l2(u, u_star) <= 1e-8);
  CHECK(prob.residual(u, f).norm() <= 1e-8 * f.norm());
}

TEST_CASE("zero forcing has the zero solution") {
  const Grid g = Grid::line(0, 1, 32);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("constant", 1.0));
  const Vector f = Vector::Zero(prob.dim_f);

  bool ok = false;
  Vector u0 = Vector::Constant(prob.dim_u, 0.3);
  NewtonOptions tight;
  tight.tol_abs = 1e-12;
  tight.tol_rel = 1e-12;
  const Vector u = newton_solve(prob, f, u0, tight, &ok);
  CHECK(ok);
  CHECK(u.norm() <= 1e-8);
}

TEST_CASE("small forcing matches the linearized solve at cubic order") {
  const Grid g = Grid::line(0, 1, 48);
  const MediaField media = media_preset("constant", 1.0);
  const NonlinearProblem prob = semilinear_preset(g, media);

  // the cubic term is the only difference, so the deviation from the
  // linear solve scales like the cube of the amplitude
  const Vector shape = interior_sine(g, 1);
  std::vector<double> dev;
  for (double amp : {0.4, 0.2}) {
    const Vector f = amp * shape;
    const Vector u = solve_to_tol(prob, f);
    SparseMatrix a = prob.jacobian(Vector::Zero(prob.dim_u));
    Eigen::SparseLU<SparseMatrix> lu(a);
    const Vector u_lin = lu.solve(f);
    dev.push_back((u - u_lin).norm());
  }
  const double ratio = dev[0] / dev[1];
  CHECK(ratio >= 6.0);
  CHECK(ratio <= 10.0);
}

TEST_CASE("preset argument errors") {
  const Grid g2 = Grid::rect(0, 1, 8, 0, 1, 8);
  CHECK_THROWS_AS(semilinear_preset(g2, media_preset("constant", 1.0)),
                  std::invalid_argument);
  const Grid g1 = Grid::line(0, 1, 16);
  CHECK_THROWS_AS(sine_mode_sampler(g2, 2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sine_mode_sampler(g1, 0, 1.0), std::invalid_argument);
}

TEST_CASE("sampling a linear problem reproduces the direct solves") {
  const Grid g = Grid::line(0, 1, 40);
  const NonlinearProblem lin_as_newton =
      semilinear_preset(g, media_preset("periodic_1d", 0.5));
  // strip the cubic part by reusing only the assembled linear operator
  SparseMatrix a = lin_as_newton.jacobian(Vector::Zero(lin_as_newton.dim_u));
  const NonlinearProblem prob = linear_problem(a);

  const Sampler sampler = sine_mode_sampler(g, 3, 1.0);
  const SampleCloud cloud = offline_sample(prob, 12, sampler, 99, "sine3");
  REQUIRE(cloud.f.cols() == 12);
  REQUIRE(cloud.u.cols() == 12);
  CHECK(cloud.seed == 99);
  CHECK(cloud.sampler_label == "sine3");

  Eigen::SparseLU<SparseMatrix> lu(a);
  for (int i = 0; i < 12; ++i) {
    const Vector want = lu.solve(cloud.f.col(i));
    CHECK(rel_l2(cloud.u.col(i), want) <= 1e-8);
    CHECK(prob.residual(cloud.u.col(i), cloud.f.col(i)).norm() <=
          1e-8 * cloud.f.col(i).norm());
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  const Grid g = Grid::line(0, 1, 24);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("constant", 1.0));
  const Sampler sampler = sine_mode_sampler(g, 2, 2.0);

  const SampleCloud c1 = offline_sample(prob, 8, sampler, 1234, "s");
  const SampleCloud c2 = offline_sample(prob, 8, sampler, 1234, "s");
  CHECK((c1.f.array() == c2.f.array()).all());
  CHECK((c1.u.array() == c2.u.array()).all());

  const SampleCloud c3 = offline_sample(prob, 8, sampler, 1235, "s");
  CHECK((c1.f - c3.f).norm() > 0.0);
}

TEST_CASE("single sample and failure paths") {
  const Grid g = Grid::line(0, 1, 16);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("constant", 1.0));
  const Sampler sampler = sine_mode_sampler(g, 2, 1.0);

  const SampleCloud one = offline_sample(prob, 1, sampler, 5);
  CHECK(one.f.cols() == 1);
  CHECK(prob.residual(one.u.col(0), one.f.col(0)).norm() <= 1e-8);

  CHECK_THROWS_AS(offline_sample(prob, 0, sampler, 5), std::invalid_argument);

  // a residual that ignores the iterate never accepts a step
  NonlinearProblem stuck;
  stuck.dim_f = 3;
  stuck.dim_u = 3;
  stuck.residual = [](const Vector&, const Vector&) {
    return Vector::Ones(3);
  };
  stuck.jacobian = [](const Vector&) {
    SparseMatrix j(3, 3);
    j.setIdentity();
    return j;
  };
  const Sampler s3 = [](std::uint64_t) { return Vector::Zero(3); };
  CHECK_THROWS_WITH_AS(
      offline_sample(stuck, 2, s3, 7),
      "offline_sample: solve failed for sample 0 after 3 attempts",
      std::runtime_error);
}

TEST_CASE("nearest neighbors on a planted line") {
  SampleCloud cloud;
  cloud.f.resize(2, 6);
  cloud.u.resize(1, 6);
  for (int i = 0; i < 6; ++i) {
    cloud.f(0, i) = (double)i;
    cloud.f(1, i) = 0.0;
    cloud.u(0, i) = 10.0 * i;
  }

  Vector q(2);
  q << 2.3, 0.0;
  const std::vector<int> idx = knn(cloud, q, 4);
  CHECK(idx == std::vector<int>{2, 3, 1, 4});

  // ties break toward the lower index
  q << 2.0, 0.0;
  const std::vector<int> tie = knn(cloud, q, 3);
  CHECK(tie[0] == 2);
  CHECK(tie[1] == 1);
  CHECK(tie[2] == 3);

  // an exact cloud point leads its own list
  const std::vector<int> self = knn(cloud, cloud.f.col(3), 1);
  CHECK(self[0] == 3);

  // k = n is a permutation of everything
  std::vector<int> all = knn(cloud, q, 6);
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<int>{0, 1, 2, 3, 4, 5});

  CHECK_THROWS_AS(knn(cloud, q, 7), std::invalid_argument);
  CHECK_THROWS_AS(knn(cloud, q, 0), std::invalid_argument);
  CHECK_THROWS_AS(knn(cloud, Vector::Zero(3), 2), std::invalid_argument);
}

TEST_CASE("interpolation is exact on cloud points") {
  const Grid g = Grid::line(0, 1, 40);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("periodic_1d", 0.25));
  const SampleCloud cloud =
      offline_sample(prob, 30, sine_mode_sampler(g, 2, 1.5), 42);

  for (int i : {0, 7, 29}) {
    const Vector v1 = online_interpolate(cloud, cloud.f.col(i), 1);
    CHECK((v1 - cloud.u.col(i)).norm() == 0.0);
    const Vector v5 = online_interpolate(cloud, cloud.f.col(i), 5);
    CHECK((v5 - cloud.u.col(i)).norm() <= 1e-8 * cloud.u.col(i).norm());
  }
}

TEST_CASE("linear problems interpolate exactly inside the sampled plane") {
  const Grid g = Grid::line(0, 1, 40);
  SparseMatrix a = semilinear_preset(g, media_preset("periodic_1d", 0.5))
                       .jacobian(Vector::Zero(39));
  const NonlinearProblem prob = linear_problem(a);

  // every input lives in the two-mode plane, so any query drawn from the
  // same generator sits in the affine hull of its neighbors
  const Sampler sampler = sine_mode_sampler(g, 2, 1.0);
  const SampleCloud cloud = offline_sample(prob, 25, sampler, 11);

  Eigen::SparseLU<SparseMatrix> lu(a);
  for (int t = 0; t < 5; ++t) {
    const Vector f = sampler(derive_seed(500, "q", t));
    const Vector got = online_interpolate(cloud, f, 6);
    const Vector want = lu.solve(f);
    CHECK(rel_l2(got, want) <= 1e-8);
  }
}

TEST_CASE("test error median decreases as the cloud grows") {
  const Grid g = Grid::line(0, 1, 48);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("periodic_1d", 0.25));
  const Sampler sampler = sine_mode_sampler(g, 2, 1.5);

  // fixed query set, solved once by Newton as the oracle
  std::vector<Vector> queries, truth;
  for (int t = 0; t < 20; ++t) {
    queries.push_back(sampler(derive_seed(909, "query", t)));
    truth.push_back(solve_to_tol(prob, queries.back()));
  }

  std::vector<double> medians;
  for (int n : {50, 200, 800}) {
    const SampleCloud cloud = offline_sample(prob, n, sampler, 77);
    std::vector<double> errs;
    for (int t = 0; t < 20; ++t)
      errs.push_back(
          rel_l2(online_interpolate(cloud, queries[t], 6), truth[t]));
    std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
    medians.push_back(errs[10]);
  }
  CHECK(medians[1] <= medians[0]);
  CHECK(medians[2] <= medians[1]);
  CHECK(medians[2] <= 1e-2);
}

TEST_CASE("dimension probe reads planted structure") {
  CounterRng rng(derive_seed(31, "probe", 0));

  SUBCASE("two-plane cloud") {
    const int n = 40, du = 30;
    DenseMatrix basis(du, 2);
    for (int i = 0; i < du; ++i)
      for (int j = 0; j < 2; ++j) basis(i, j) = rng.normal();
    SampleCloud cloud;
    cloud.f.resize(2, n);
    cloud.u.resize(du, n);
    for (int i = 0; i < n; ++i) {
      Vector c(2);
      c << rng.normal(), rng.normal();
      cloud.f.col(i) = c;
      cloud.u.col(i) = basis * c;
      for (int r = 0; r < du; ++r) cloud.u(r, i) += 1e-6 * rng.normal();
    }
    const DimProbe probe = local_dimension_probe(cloud, 0, 1.0);
    CHECK(probe.members == n);
    CHECK(probe.dim == 2);
  }

  SUBCASE("gently curved line, small radius") {
    const int n = 60;
    SampleCloud cloud;
    cloud.f.resize(1, n);
    cloud.u.resize(3, n);
    for (int i = 0; i < n; ++i) {
      const double t = (double)i / (n - 1);
      cloud.f(0, i) = t;
      cloud.u(0, i) = t;
      cloud.u(1, i) = 0.2 * t * t;
      cloud.u(2, i) = 0.1 * t * t * t;
    }
    const DimProbe probe = local_dimension_probe(cloud, n / 2, 0.15);
    CHECK(probe.members >= 5);
    CHECK(probe.dim == 1);
  }

  SUBCASE("two-mode semilinear cloud stays near two-dimensional") {
    const Grid g = Grid::line(0, 1, 40);
    const NonlinearProblem prob =
        semilinear_preset(g, media_preset("periodic_1d", 0.25));
    const SampleCloud cloud =
        offline_sample(prob, 120, sine_mode_sampler(g, 2, 1.5), 13);
    const DimProbe probe = local_dimension_probe(cloud, 0, 0.4);
    CHECK(probe.members >= 5);
    CHECK(probe.dim <= 3);
  }

  SUBCASE("argument errors") {
    SampleCloud cloud;
    cloud.f = DenseMatrix::Zero(2, 6);
    cloud.u = DenseMatrix::Zero(3, 6);
    for (int i = 0; i < 6; ++i) cloud.f(0, i) = (double)i;
    CHECK_THROWS_AS(local_dimension_probe(cloud, -1, 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(local_dimension_probe(cloud, 0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_WITH_AS(local_dimension_probe(cloud, 0, 1e-3),
                         "local_dimension_probe: fewer than 5 points in radius",
                         std::runtime_error);
  }
}

TEST_CASE("cloud persistence round trip") {
  const Grid g = Grid::line(0, 1, 24);
  const NonlinearProblem prob =
      semilinear_preset(g, media_preset("periodic_1d", 0.5));
  const SampleCloud cloud =
      offline_sample(prob, 6, sine_mode_sampler(g, 2, 1.0), 21, "sine2");

  nlohmann::json spec;
  spec["problem"] = "semilinear";
  spec["media"] = "periodic_1d";
  spec["epsilon"] = 0.5;
  spec["cells"] = 24;

  TempDir dir("cloud");
  const std::string store = (dir.path / "cloud").string();
  save_cloud(store, cloud, spec);
  CHECK(std::filesystem::exists(store + "/manifest.json"));

  const SampleCloud back = load_cloud(store, spec);
  CHECK((back.f.array() == cloud.f.array()).all());
  CHECK((back.u.array() == cloud.u.array()).all());
  CHECK(back.seed == 21);
  CHECK(back.sampler_label == "sine2");

  nlohmann::json other = spec;
  other["epsilon"] = 0.25;
  CHECK_THROWS_WITH_AS(load_cloud(store, other),
                       doctest::Contains("mismatched problem spec"),
                       std::runtime_error);

  const std::string bogus = (dir.path / "bogus").string();
  std::filesystem::create_directories(bogus);
  std::ofstream(bogus + "/manifest.json")
      << R"({"type":"reduced_maps","spec":{}})";
  CHECK_THROWS_WITH_AS(load_cloud(bogus, spec),
                       doctest::Contains("not a sample cloud store"),
                       std::runtime_error);

  CHECK_THROWS_WITH_AS(load_cloud((dir.path / "missing").string(), spec),
                       doctest::Contains("cannot read manifest"),
                       std::runtime_error);
}
