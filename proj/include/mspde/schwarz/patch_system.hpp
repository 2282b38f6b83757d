#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mspde/elliptic/solver.hpp"
#include "mspde/partition/partition.hpp"
#include "mspde/rte/solver.hpp"

namespace mspde {

// One patch of a decomposed problem, reduced to the handful of callables the
// interface iteration needs. Boundary data f_m is Dirichlet trace (elliptic)
// or incoming ordinates (transport); target values are the solution on the
// nodes this patch owns, which is where neighbors read their updates.
struct PatchLocal {
  int id = 0;
  int n_boundary = 0;
  int n_full = 0;
  int n_target = 0;
  std::function<Vector(const Vector&)> solve_full;  // f -> full patch field
  std::function<Vector(const Vector&)> apply_S;     // f -> target values
  std::function<Vector(const Vector&)> apply_ST;    // Euclidean transpose
  std::function<long()> solve_counter;              // fine solves so far
  std::vector<int> target_to_full;     // full index per target index
  std::vector<long> full_to_global;    // global value index per full index
  std::vector<long> target_to_global;  // global value index per target index
  Vector chi_full;                     // blend weight per full index
};

// f_n components that are copied from a neighbor's owned values each sweep.
struct TraceWrite {
  int src_patch = 0;
  int src_target = 0;  // index into the source patch target vector
  int dst_patch = 0;
  int dst_comp = 0;  // index into the destination boundary vector
};

// f_m components pinned to the global boundary data.
struct Pin {
  int patch = 0;
  int comp = 0;      // index into the boundary vector
  int full_idx = 0;  // lattice position of that component
  int phi_idx = 0;   // index into the global boundary vector
};

struct PatchSystem {
  Partition part;
  int ncomp = 1;          // values per grid node (1, or ordinate count)
  long global_size = 0;   // grid nodes * ncomp
  int phi_size = 0;
  std::vector<PatchLocal> locals;
  std::vector<TraceWrite> writes;
  std::vector<Pin> pins;
  std::vector<char> covered;  // global value indices reachable from owners/pins
  std::vector<std::shared_ptr<void>> keep_alive;

  long total_fine_solves() const;
};

// Dirichlet data on the grid perimeter, ordered like perimeter_nodes of the
// whole grid box.
PatchSystem build_elliptic_system(const Partition& part, const MediaField& media);
Vector elliptic_phi(const Grid& grid, const std::function<double(double, double)>& f);

// Incoming data layout mirrors the local one: left endpoint v > 0 ascending,
// then right endpoint v < 0 ascending.
PatchSystem build_rte_system(const Partition& part, const CollisionKernel& kernel,
                             const OrdinateSet& ordinates);
Vector rte_phi(const OrdinateSet& ordinates,
               const std::function<double(int side, double v)>& f);

}  // namespace mspde
