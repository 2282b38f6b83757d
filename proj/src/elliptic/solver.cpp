#include "mspde/elliptic/solver.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace mspde {

LocalEllipticSolver::LocalEllipticSolver(const Grid& grid, const Box& box,
                                         const MediaField& media,
                                         std::vector<long> target_nodes)
    : grid_(grid), box_(box) {
  full_nodes_ = box_nodes(grid_, box_);
  boundary_ = perimeter_nodes(grid_, box_);
  const int n_full = (int)full_nodes_.size();

  lid_bnd_.assign(n_full, -1);
  for (size_t b = 0; b < boundary_.size(); ++b)
    lid_bnd_[box_local_id(grid_, box_, boundary_[b])] = (int)b;

  lid_int_.assign(n_full, -1);
  for (int l = 0; l < n_full; ++l) {
    if (lid_bnd_[l] < 0) {
      lid_int_[l] = (int)interior_lid_.size();
      interior_lid_.push_back(l);
    }
  }
  if (interior_lid_.empty())
    throw std::invalid_argument("elliptic solver: box has no interior nodes");

  // node samples of the coefficient, checked positive up front
  Vector a_node(n_full);
  for (int l = 0; l < n_full; ++l) {
    const auto c = grid_.node_coords(full_nodes_[l]);
    const double v =
        media.a(grid_.coord(0, c[0]), grid_.dim == 2 ? grid_.coord(1, c[1]) : 0.0);
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("elliptic solver: media must be positive");
    a_node(l) = v;
  }

  const int nx = box_.nodes(0);
  const int n_int = (int)interior_lid_.size();
  const int n_bnd = (int)boundary_.size();
  std::vector<Eigen::Triplet<double>> tii, tib;
  const int dim = grid_.dim;
  for (int ii = 0; ii < n_int; ++ii) {
    const int l = interior_lid_[ii];
    const int ix = l % nx;
    const int iy = l / nx;
    double diag = 0.0;
    const int step[2] = {1, nx};
    const int pos[2] = {ix, iy};
    const int top[2] = {box_.nodes(0) - 1, box_.nodes(1) - 1};
    for (int a = 0; a < dim; ++a) {
      const double h2 = grid_.ax[a].h() * grid_.ax[a].h();
      for (int s = -1; s <= 1; s += 2) {
        const int q = pos[a] + s;
        if (q < 0 || q > top[a]) continue;  // cannot happen for interior nodes
        const int ln = l + s * step[a];
        const double af = 2.0 / (1.0 / a_node(l) + 1.0 / a_node(ln));
        diag += af / h2;
        if (lid_int_[ln] >= 0)
          tii.emplace_back(ii, lid_int_[ln], -af / h2);
        else
          tib.emplace_back(ii, lid_bnd_[ln], -af / h2);
      }
    }
    tii.emplace_back(ii, ii, diag);
  }
  a_ii_.resize(n_int, n_int);
  a_ii_.setFromTriplets(tii.begin(), tii.end());
  a_ib_.resize(n_int, n_bnd);
  a_ib_.setFromTriplets(tib.begin(), tib.end());

  llt_.compute(a_ii_);
  if (llt_.info() != Eigen::Success)
    throw std::runtime_error("elliptic solver: Cholesky factorization failed");

  // target defaults to every interior node
  if (target_nodes.empty()) {
    target_int_.resize(n_int);
    for (int i = 0; i < n_int; ++i) target_int_[i] = i;
  } else {
    target_int_.reserve(target_nodes.size());
    for (long g : target_nodes) {
      const int l = box_local_id(grid_, box_, g);
      if (lid_int_[l] < 0)
        throw std::invalid_argument("elliptic solver: target node not interior");
      target_int_.push_back(lid_int_[l]);
    }
  }
}

std::vector<long> LocalEllipticSolver::target_nodes() const {
  std::vector<long> out;
  out.reserve(target_int_.size());
  for (int i : target_int_) out.push_back(full_nodes_[interior_lid_[i]]);
  return out;
}

Vector LocalEllipticSolver::scatter_full(const Vector& u_interior,
                                         const Vector& boundary) const {
  Vector full(n_full());
  for (int l = 0; l < n_full(); ++l)
    full(l) = lid_int_[l] >= 0 ? u_interior(lid_int_[l]) : boundary(lid_bnd_[l]);
  return full;
}

Vector LocalEllipticSolver::solve_dirichlet(const Vector& boundary,
                                            const Vector& source) const {
  if (boundary.size() != n_boundary())
    throw std::invalid_argument("solve_dirichlet: boundary size mismatch");
  if (source.size() != n_interior())
    throw std::invalid_argument("solve_dirichlet: source size mismatch");
  const Vector rhs = source - a_ib_ * boundary;
  const Vector u_i = llt_.solve(rhs);
  ++solves_;
  return scatter_full(u_i, boundary);
}

Vector LocalEllipticSolver::solve_dirichlet(const Vector& boundary) const {
  return solve_dirichlet(boundary, Vector::Zero(n_interior()));
}

Vector LocalEllipticSolver::restrict_target(const Vector& full_field) const {
  if (full_field.size() != n_full())
    throw std::invalid_argument("restrict_target: field size mismatch");
  Vector out(n_target());
  for (size_t i = 0; i < target_int_.size(); ++i)
    out((Eigen::Index)i) = full_field(interior_lid_[target_int_[i]]);
  return out;
}

Vector LocalEllipticSolver::restrict_interior(const Vector& full_field) const {
  if (full_field.size() != n_full())
    throw std::invalid_argument("restrict_interior: field size mismatch");
  Vector out(n_interior());
  for (int i = 0; i < n_interior(); ++i) out(i) = full_field(interior_lid_[i]);
  return out;
}

Vector LocalEllipticSolver::apply_confined(const Vector& boundary) const {
  return restrict_target(solve_dirichlet(boundary));
}

Vector LocalEllipticSolver::apply_confined_transpose(
    const Vector& target_values) const {
  if (target_values.size() != n_target())
    throw std::invalid_argument("apply_confined_transpose: size mismatch");
  Vector g = Vector::Zero(n_interior());
  for (size_t i = 0; i < target_int_.size(); ++i)
    g(target_int_[i]) += target_values((Eigen::Index)i);
  const Vector h = llt_.solve(g);
  ++solves_;
  return -(a_ib_.transpose() * h);
}

Vector LocalEllipticSolver::adjoint_flux(const Vector& g_interior) const {
  if (g_interior.size() != n_interior())
    throw std::invalid_argument("adjoint_flux: source size mismatch");
  std::vector<char> on_target(n_interior(), 0);
  for (int i : target_int_) on_target[i] = 1;
  for (int i = 0; i < n_interior(); ++i)
    if (!on_target[i] && g_interior(i) != 0.0)
      throw std::invalid_argument("adjoint_flux: source must vanish on overlap");
  const Vector h = llt_.solve(g_interior);
  ++solves_;
  return -(a_ib_.transpose() * h);
}

DenseMatrix LocalEllipticSolver::greens_matrix() const {
  DenseMatrix g(n_target(), n_boundary());
  Vector e = Vector::Zero(n_boundary());
  for (int b = 0; b < n_boundary(); ++b) {
    e(b) = 1.0;
    g.col(b) = apply_confined(e);
    e(b) = 0.0;
  }
  return g;
}

}  // namespace mspde
