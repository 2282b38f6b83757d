#pragma once

#include <array>
#include <vector>

#include <json.hpp>

#include "mspde/partition/grid.hpp"

namespace mspde {

// One overlapping subdomain. boundary_nodes is the ordered perimeter of the
// patch box; interior_nodes is the disjoint block of nodes this patch owns
// (every grid node has exactly one owner, and interface updates are read
// from the owner). chi holds the partition-of-unity weight for every node
// of the patch box, in box-lexicographic order.
struct Patch {
  int id = 0;
  Box box;
  std::vector<long> boundary_nodes;
  std::vector<long> interior_nodes;
  std::vector<int> neighbors;  // sorted, symmetric
  Vector chi;
};

struct Partition {
  Grid grid;
  std::array<int, 2> counts{1, 1};  // patches per axis
  int overlap = 0;                  // extra node layers shared across a cut
  std::vector<Patch> patches;
  std::vector<int> owner;  // per grid node, owning patch id
};

// Splits the grid into counts[0] x counts[1] overlapping boxes. Cuts are
// placed at round(i*cells/count) per axis; each box extends overlap/2 nodes
// past its cuts (split floor/ceil), so adjacent boxes share overlap+1 node
// layers. Throws "degenerate overlap" when cuts are closer than the overlap
// allows, and rejects boxes without interior nodes.
Partition build_partition(const Grid& g, std::array<int, 2> counts, int overlap);

// Per-node field helpers; ncomp values are stored contiguously per node.
Vector restrict_to_patch(const Partition& p, const Patch& k,
                         const Vector& global_field, int ncomp = 1);
Vector extend_by_zero(const Partition& p, const Patch& k,
                      const Vector& local_field, int ncomp = 1);

// Partition-of-unity blend of per-patch fields: sum_m chi_m .* u_m, with
// chi summing to one at every grid node.
Vector pou_blend(const Partition& p, const std::vector<Vector>& locals,
                 int ncomp = 1);

nlohmann::json partition_to_json(const Partition& p);

}  // namespace mspde
