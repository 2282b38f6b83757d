#include "mspde/rte/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

LocalRteSolver::LocalRteSolver(const Grid& grid, const Box& box,
                               const CollisionKernel& kernel,
                               const OrdinateSet& ordinates,
                               std::vector<long> target_xnodes)
    : grid_(grid), box_(box), kernel_(kernel), ords_(ordinates) {
  if (grid_.dim != 1)
    throw std::invalid_argument("rte solver: needs a 1D grid");
  n_loc_ = box_.nodes(0);
  if (n_loc_ < 3)
    throw std::invalid_argument("rte solver: box has no interior nodes");
  h_ = grid_.ax[0].h();
  const int nv = ords_.size();

  // incoming slots: left endpoint for v > 0 (ascending), then right for v < 0
  for (int j = 0; j < nv; ++j)
    if (ords_.v(j) > 0.0) in_pairs_.emplace_back(0, j);
  for (int j = 0; j < nv; ++j)
    if (ords_.v(j) < 0.0) in_pairs_.emplace_back(n_loc_ - 1, j);
  bc_row_.resize(in_pairs_.size());
  is_bc_.assign(n_full(), 0);
  for (size_t s = 0; s < in_pairs_.size(); ++s) {
    bc_row_[s] = in_pairs_[s].first * nv + in_pairs_[s].second;
    is_bc_[bc_row_[s]] = 1;
  }

  if (target_xnodes.empty()) {
    for (int lx = 1; lx + 1 < n_loc_; ++lx) {
      target_lx_.push_back(lx);
      target_x_.push_back(grid_.node_id(box_.lo[0] + lx));
    }
  } else {
    for (long gx : target_xnodes) {
      const int lx = box_local_id(grid_, box_, gx);
      target_lx_.push_back(lx);
      target_x_.push_back(gx);
    }
  }

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve((size_t)n_full() * (nv + 2));
  for (int xi = 0; xi < n_loc_; ++xi) {
    const double x = grid_.coord(0, box_.lo[0] + xi);
    const DenseMatrix K = kernel_matrix(kernel_, ords_, x);
    for (int j = 0; j < nv; ++j) {
      const int row = xi * nv + j;
      if (is_bc_[row]) {
        trip.emplace_back(row, row, 1.0);
        continue;
      }
      const double v = ords_.v(j);
      if (v > 0.0) {  // backward difference, upwind from the left
        trip.emplace_back(row, row, -v / h_);
        trip.emplace_back(row, (xi - 1) * nv + j, v / h_);
      } else {  // forward difference, upwind from the right
        trip.emplace_back(row, row, v / h_);
        trip.emplace_back(row, (xi + 1) * nv + j, -v / h_);
      }
      double loss = 0.0;
      for (int l = 0; l < nv; ++l) {
        const double gain = K(j, l) * ords_.w(l);
        trip.emplace_back(row, xi * nv + l, gain);
        loss += gain;
      }
      trip.emplace_back(row, row, -loss);
    }
  }
  t_.resize(n_full(), n_full());
  t_.setFromTriplets(trip.begin(), trip.end());
  lu_.compute(t_);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error("rte solver: LU factorization failed");
}

Vector LocalRteSolver::solve_transport(const Vector& incoming,
                                       const Vector& source) const {
  if (incoming.size() != (Eigen::Index)in_pairs_.size())
    throw std::invalid_argument("solve_transport: incoming size mismatch");
  if (source.size() != n_full())
    throw std::invalid_argument("solve_transport: source size mismatch");
  Vector rhs = source;
  for (size_t s = 0; s < in_pairs_.size(); ++s)
    rhs(bc_row_[s]) = incoming((Eigen::Index)s);
  ++solves_;
  return lu_.solve(rhs);
}

Vector LocalRteSolver::solve_transport(const Vector& incoming) const {
  return solve_transport(incoming, Vector::Zero(n_full()));
}

Vector LocalRteSolver::restrict_target(const Vector& full_field) const {
  if (full_field.size() != n_full())
    throw std::invalid_argument("restrict_target: field size mismatch");
  const int nv = ords_.size();
  Vector out(n_target());
  for (size_t i = 0; i < target_lx_.size(); ++i)
    out.segment((Eigen::Index)i * nv, nv) =
        full_field.segment(target_lx_[i] * nv, nv);
  return out;
}

Vector LocalRteSolver::apply_confined(const Vector& incoming) const {
  return restrict_target(solve_transport(incoming));
}

Vector LocalRteSolver::apply_confined_transpose(
    const Vector& target_values) const {
  if (target_values.size() != n_target())
    throw std::invalid_argument("apply_confined_transpose: size mismatch");
  const int nv = ords_.size();
  Vector g = Vector::Zero(n_full());
  for (size_t i = 0; i < target_lx_.size(); ++i)
    g.segment(target_lx_[i] * nv, nv) +=
        target_values.segment((Eigen::Index)i * nv, nv);
  ++solves_;
  const Vector y = lu_.transpose().solve(g);
  Vector out((Eigen::Index)in_pairs_.size());
  for (size_t s = 0; s < in_pairs_.size(); ++s)
    out((Eigen::Index)s) = y(bc_row_[s]);
  return out;
}

Vector LocalRteSolver::adjoint_incoming(const Vector& g_full) const {
  if (g_full.size() != n_full())
    throw std::invalid_argument("adjoint_incoming: source size mismatch");
  const int nv = ords_.size();
  std::vector<char> on_target(n_loc_, 0);
  for (int lx : target_lx_) on_target[lx] = 1;
  Vector gw = Vector::Zero(n_full());
  for (int xi = 0; xi < n_loc_; ++xi) {
    for (int j = 0; j < nv; ++j) {
      const double gv = g_full(xi * nv + j);
      if (gv == 0.0) continue;
      if (!on_target[xi])
        throw std::invalid_argument("adjoint_incoming: source must vanish on overlap");
      gw(xi * nv + j) = h_ * ords_.w(j) * gv;  // lattice measure dx dv
    }
  }
  ++solves_;
  const Vector y = lu_.transpose().solve(gw);
  Vector out((Eigen::Index)in_pairs_.size());
  for (size_t s = 0; s < in_pairs_.size(); ++s) {
    const int j = in_pairs_[s].second;
    out((Eigen::Index)s) = y(bc_row_[s]) / (std::abs(ords_.v(j)) * ords_.w(j));
  }
  return out;
}

Vector LocalRteSolver::velocity_average(const Vector& full_field) const {
  if (full_field.size() != n_full())
    throw std::invalid_argument("velocity_average: field size mismatch");
  const int nv = ords_.size();
  Vector out(n_loc_);
  for (int xi = 0; xi < n_loc_; ++xi)
    out(xi) = 0.5 * ords_.w.dot(full_field.segment(xi * nv, nv));
  return out;
}

DenseMatrix LocalRteSolver::confined_matrix() const {
  DenseMatrix s(n_target(), (Eigen::Index)in_pairs_.size());
  Vector e = Vector::Zero((Eigen::Index)in_pairs_.size());
  for (int c = 0; c < (int)in_pairs_.size(); ++c) {
    e(c) = 1.0;
    s.col(c) = apply_confined(e);
    e(c) = 0.0;
  }
  return s;
}

}  // namespace mspde
