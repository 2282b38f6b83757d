#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mspde/elliptic/media.hpp"
#include "mspde/partition/grid.hpp"

namespace mspde {

// Nonlinear input-to-solution map R(u; f) = 0, with a sparse Jacobian in u.
// dim_f and dim_u are the input and solution sizes.
struct NonlinearProblem {
  int dim_f = 0;
  int dim_u = 0;
  std::function<Vector(const Vector& u, const Vector& f)> residual;
  std::function<SparseMatrix(const Vector& u)> jacobian;
};

struct NewtonOptions {
  int max_iter = 50;
  double tol_abs = 1e-10;
  double tol_rel = 1e-8;  // relative to the initial residual
  int max_backtrack = 30;
};

// Damped Newton with residual-norm backtracking. Returns the iterate and
// sets *ok; no exception on non-convergence so samplers can retry.
Vector newton_solve(const NonlinearProblem& prob, const Vector& f,
                    const Vector& u0, const NewtonOptions& opts, bool* ok);

// -(a(x) u')' + u^3 = f on the grid interval, zero Dirichlet ends, unknowns
// on interior nodes, same harmonic-average stencil as the linear solver.
NonlinearProblem semilinear_preset(const Grid& grid1d, const MediaField& media);

// Linear problem A u = f wrapped in the same interface.
NonlinearProblem linear_problem(SparseMatrix a);

// Solved samples (f_i, u_i) stored column-wise.
struct SampleCloud {
  DenseMatrix f;  // dim_f x n
  DenseMatrix u;  // dim_u x n
  std::uint64_t seed = 0;
  std::string sampler_label;
};

using Sampler = std::function<Vector(std::uint64_t draw_seed)>;

// Draws f from the sampler and solves each to tolerance; a failed solve is
// redrawn up to 3 times before giving up with an error naming the sample.
SampleCloud offline_sample(const NonlinearProblem& prob, int n,
                           const Sampler& sampler, std::uint64_t seed,
                           const std::string& sampler_label = "");

// Low-dimensional input model: f = sum_i c_i sin((i+1) pi x) on interior
// nodes, c_i iid normal times amplitude.
Sampler sine_mode_sampler(const Grid& grid1d, int n_modes, double amplitude);

// Indices of the k nearest samples by Euclidean input distance, ties broken
// toward the lower index.
std::vector<int> knn(const SampleCloud& cloud, const Vector& f, int k);

// Tangent-plane interpolation through the nearest sample: least-squares
// coefficients of f - f_near in the neighbor input differences, applied to
// the output differences. k = 1 degenerates to nearest-neighbor lookup.
Vector online_interpolate(const SampleCloud& cloud, const Vector& f, int k);

struct DimProbe {
  Vector spectrum;  // singular values of centered neighborhood outputs
  int dim = 0;      // values above 0.05 * spectrum(0)
  int members = 0;
};

// Effective local dimension around sample center: collect all samples
// within radius_frac of the farthest input distance, SVD the centered
// outputs. Needs at least 5 members.
DimProbe local_dimension_probe(const SampleCloud& cloud, int center,
                               double radius_frac);

// Directory layout: inputs.csv, outputs.csv, manifest.json with the
// caller's spec; loading refuses mismatched specs.
void save_cloud(const std::string& dir, const SampleCloud& cloud,
                const nlohmann::json& spec);
SampleCloud load_cloud(const std::string& dir,
                       const nlohmann::json& expected_spec);

}  // namespace mspde
