#pragma once

#include <atomic>
#include <vector>

#include <Eigen/SparseCholesky>

#include "mspde/elliptic/media.hpp"
#include "mspde/partition/grid.hpp"

namespace mspde {

// Dirichlet solver for -div(a grad u) = f on one box of a node lattice,
// 3-point (1D) or 5-point (2D) stencil with harmonic face averages
//   a_{i+1/2} = 2 / (1/a_i + 1/a_{i+1}).
// The interior matrix is SPD and factored once (sparse Cholesky); every
// subsequent boundary-data or source solve is a pair of triangular sweeps.
//
// The confined map S takes boundary data to the solution values on a target
// node set (default: all interior nodes). Its Euclidean transpose is exact
// and doubles as the boundary-flux adjoint: for a source g placed on the
// target nodes, S^T g equals the one-sided discrete flux a dh/dn of the
// zero-Dirichlet sourced solve, scaled by the mesh width along the normal.
class LocalEllipticSolver {
 public:
  LocalEllipticSolver(const Grid& grid, const Box& box, const MediaField& media,
                      std::vector<long> target_nodes = {});

  int n_boundary() const { return (int)boundary_.size(); }
  int n_interior() const { return (int)interior_lid_.size(); }
  int n_target() const { return (int)target_int_.size(); }
  int n_full() const { return (int)full_nodes_.size(); }

  const std::vector<long>& boundary_nodes() const { return boundary_; }
  const std::vector<long>& full_nodes() const { return full_nodes_; }
  std::vector<long> target_nodes() const;

  // boundary ordered like boundary_nodes(); source over interior nodes in
  // box-lexicographic order; returns the full box field
  Vector solve_dirichlet(const Vector& boundary, const Vector& source) const;
  Vector solve_dirichlet(const Vector& boundary) const;

  Vector restrict_target(const Vector& full_field) const;
  Vector restrict_interior(const Vector& full_field) const;

  // confined solution map and its exact transpose
  Vector apply_confined(const Vector& boundary) const;
  Vector apply_confined_transpose(const Vector& target_values) const;

  // g lives on interior nodes and must vanish off the target set; returns
  // per boundary node the discrete flux of the sourced adjoint solve
  Vector adjoint_flux(const Vector& g_interior) const;

  // dense confined map, column n = confined solve for the n-th boundary delta
  DenseMatrix greens_matrix() const;

  long solve_count() const { return solves_.load(); }

 private:
  Vector scatter_full(const Vector& u_interior, const Vector& boundary) const;

  Grid grid_;
  Box box_;
  std::vector<long> full_nodes_;   // box nodes, lex order
  std::vector<long> boundary_;    // perimeter order
  std::vector<int> interior_lid_; // local ids of interior nodes
  std::vector<int> lid_int_;      // local id -> interior index or -1
  std::vector<int> lid_bnd_;      // local id -> boundary index or -1
  std::vector<int> target_int_;   // interior indices forming the target set
  SparseMatrix a_ii_, a_ib_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  mutable std::atomic<long> solves_{0};
};

}  // namespace mspde
