#pragma once

#include <atomic>
#include <memory>
#include <vector>

#include <Eigen/SparseLU>

#include "mspde/partition/grid.hpp"
#include "mspde/rte/kernel.hpp"

namespace mspde {

// Discrete-ordinates solver for the slab transport equation
//   -v du/dx + S[u] = f   on one x-interval of a 1D lattice,
// first-order upwind in x (backward for v > 0, forward for v < 0), with
// incoming data prescribed where characteristics enter: (left, v > 0) and
// (right, v < 0). The coupled (x, v) system is assembled sparse and
// LU-factored once; forward and transpose solves reuse the factorization.
//
// Lattice layout: value index = xi * nv + j with xi the local x-node and j
// the ordinate (ascending v). Incoming data layout: left-incoming ordinates
// (v > 0, ascending) then right-incoming (v < 0, ascending).
//
// The confined map S takes incoming data to the lattice values on a target
// x-node set. Two adjoints are exposed: the plain Euclidean transpose (used
// for compression, matching unweighted SVD oracles), and the quadrature-
// weighted adjoint that realizes the integration-by-parts identity
//   <S xi, g>_{dx dv} = <xi, S* g>_{|v| dv on incoming pairs}.
class LocalRteSolver {
 public:
  LocalRteSolver(const Grid& grid, const Box& box, const CollisionKernel& kernel,
                 const OrdinateSet& ordinates,
                 std::vector<long> target_xnodes = {});

  int nv() const { return ords_.size(); }
  int n_incoming() const { return ords_.size(); }
  int n_xnodes() const { return n_loc_; }
  int n_full() const { return n_loc_ * ords_.size(); }
  int n_target() const { return (int)target_x_.size() * ords_.size(); }

  const OrdinateSet& ordinates() const { return ords_; }
  const std::vector<long>& target_xnodes() const { return target_x_; }
  // incoming slot -> (local x-node, ordinate)
  const std::vector<std::pair<int, int>>& incoming_pairs() const {
    return in_pairs_;
  }

  Vector solve_transport(const Vector& incoming, const Vector& source) const;
  Vector solve_transport(const Vector& incoming) const;

  Vector restrict_target(const Vector& full_field) const;

  Vector apply_confined(const Vector& incoming) const;
  Vector apply_confined_transpose(const Vector& target_values) const;

  // g on the full lattice, supported on target x-nodes; returns incoming-
  // layout values of the weighted adjoint solve
  Vector adjoint_incoming(const Vector& g_full) const;

  Vector velocity_average(const Vector& full_field) const;

  // dense confined map for oracle comparisons
  DenseMatrix confined_matrix() const;

  long solve_count() const { return solves_.load(); }

 private:
  Grid grid_;
  Box box_;
  CollisionKernel kernel_;
  OrdinateSet ords_;
  int n_loc_ = 0;
  double h_ = 0.0;
  std::vector<long> target_x_;              // global x-node ids
  std::vector<int> target_lx_;              // local x indices
  std::vector<std::pair<int, int>> in_pairs_;
  std::vector<int> bc_row_;                 // row per incoming slot
  std::vector<char> is_bc_;                 // per lattice row
  SparseMatrix t_;
  // transpose() needs a mutable factorization object even for solves
  mutable Eigen::SparseLU<SparseMatrix> lu_;
  mutable std::atomic<long> solves_{0};
};

}  // namespace mspde
