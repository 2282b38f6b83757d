#include "mspde/partition/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace mspde {

namespace {

struct AxisLayout {
  std::vector<int> cut;  // block boundaries, cut[0] = 0 .. cut[n] = cells
  std::vector<int> lo, hi;  // patch node ranges
};

AxisLayout layout_axis(int cells, int count, int overlap) {
  AxisLayout L;
  L.cut.resize(count + 1);
  for (int i = 0; i <= count; ++i)
    L.cut[i] = (int)std::llround((double)i * cells / count);
  for (int i = 0; i + 1 <= count; ++i) {
    if (count > 1 && L.cut[i + 1] - L.cut[i] <= overlap)
      throw std::invalid_argument("build_partition: degenerate overlap");
  }
  L.lo.resize(count);
  L.hi.resize(count);
  for (int i = 0; i < count; ++i) {
    L.lo[i] = i == 0 ? 0 : L.cut[i] - overlap / 2;
    L.hi[i] = i == count - 1 ? cells : L.cut[i + 1] + (overlap + 1) / 2;
    if (L.hi[i] - L.lo[i] < 2)
      throw std::invalid_argument("build_partition: patch has no interior");
  }
  return L;
}

// piecewise-linear ramp along one axis: 0 at the patch edge, 1 one node past
// the shared band, flat in between; edge patches stay flat up to the domain
double axis_ramp(const AxisLayout& L, int i, int count, int t) {
  double r = 1.0;
  if (i > 0) {
    const int lo = L.lo[i];
    const int band_end = L.hi[i - 1];
    r = std::min(r, (double)(t - lo) / (band_end + 1 - lo));
  }
  if (i < count - 1) {
    const int hi = L.hi[i];
    const int band_start = L.lo[i + 1];
    r = std::min(r, (double)(hi - t) / (hi - (band_start - 1)));
  }
  return std::max(0.0, r);
}

}  // namespace

Partition build_partition(const Grid& g, std::array<int, 2> counts,
                          int overlap) {
  if (counts[0] < 1 || (g.dim == 2 && counts[1] < 1))
    throw std::invalid_argument("build_partition: need at least one patch");
  if (g.dim == 1) counts[1] = 1;
  const int total = counts[0] * counts[1];
  if (total > 1 && overlap < 1)
    throw std::invalid_argument("build_partition: overlap must be >= 1");

  Partition p;
  p.grid = g;
  p.counts = counts;
  p.overlap = overlap;

  std::array<AxisLayout, 2> L;
  L[0] = layout_axis(g.ax[0].cells, counts[0], overlap);
  if (g.dim == 2) L[1] = layout_axis(g.ax[1].cells, counts[1], overlap);

  p.patches.resize(total);
  for (int py = 0; py < counts[1]; ++py) {
    for (int px = 0; px < counts[0]; ++px) {
      const int id = px + counts[0] * py;
      Patch& k = p.patches[id];
      k.id = id;
      k.box.lo[0] = L[0].lo[px];
      k.box.hi[0] = L[0].hi[px];
      if (g.dim == 2) {
        k.box.lo[1] = L[1].lo[py];
        k.box.hi[1] = L[1].hi[py];
      }
      k.boundary_nodes = perimeter_nodes(g, k.box);
    }
  }

  // disjoint owner blocks: along each axis node t belongs to block i when
  // cut[i] < t <= cut[i+1] (block 0 starts at 0)
  auto axis_owner = [](const AxisLayout& l, int t) {
    int i = 0;
    while (t > l.cut[i + 1]) ++i;
    return i;
  };
  p.owner.resize(g.node_count());
  for (long n = 0; n < g.node_count(); ++n) {
    const auto c = g.node_coords(n);
    const int ox = axis_owner(L[0], c[0]);
    const int oy = g.dim == 2 ? axis_owner(L[1], c[1]) : 0;
    p.owner[n] = ox + counts[0] * oy;
  }
  // neighbors: boxes that share at least one node
  for (int m = 0; m < total; ++m) {
    for (int n = 0; n < total; ++n) {
      if (m == n) continue;
      const Box& a = p.patches[m].box;
      const Box& b = p.patches[n].box;
      bool meet = a.lo[0] <= b.hi[0] && b.lo[0] <= a.hi[0];
      if (g.dim == 2) meet = meet && a.lo[1] <= b.hi[1] && b.lo[1] <= a.hi[1];
      if (meet) p.patches[m].neighbors.push_back(n);
    }
  }

  // exclusive zone: patch nodes lying in no neighboring box
  for (Patch& k : p.patches) {
    for (long n : box_nodes(g, k.box)) {
      const auto c = g.node_coords(n);
      bool shared = false;
      for (int nb : k.neighbors)
        if (p.patches[nb].box.contains(c[0], c[1])) shared = true;
      if (!shared) k.interior_nodes.push_back(n);
    }
  }

  // raw tensor-product ramps, then renormalize so the weights sum to one
  Vector sum = Vector::Zero(g.node_count());
  std::vector<Vector> raw(total);
  for (int py = 0; py < counts[1]; ++py) {
    for (int px = 0; px < counts[0]; ++px) {
      const int id = px + counts[0] * py;
      Patch& k = p.patches[id];
      const auto nodes = box_nodes(g, k.box);
      raw[id].resize((Eigen::Index)nodes.size());
      for (size_t i = 0; i < nodes.size(); ++i) {
        const auto c = g.node_coords(nodes[i]);
        double w = axis_ramp(L[0], px, counts[0], c[0]);
        if (g.dim == 2) w *= axis_ramp(L[1], py, counts[1], c[1]);
        raw[id]((Eigen::Index)i) = w;
        sum(nodes[i]) += w;
      }
    }
  }
  for (long n = 0; n < g.node_count(); ++n)
    if (!(sum(n) > 0.0))
      throw std::invalid_argument("build_partition: node not covered by any ramp");
  for (int id = 0; id < total; ++id) {
    Patch& k = p.patches[id];
    const auto nodes = box_nodes(g, k.box);
    k.chi.resize(raw[id].size());
    for (size_t i = 0; i < nodes.size(); ++i)
      k.chi((Eigen::Index)i) = raw[id]((Eigen::Index)i) / sum(nodes[i]);
  }
  return p;
}

Vector restrict_to_patch(const Partition& p, const Patch& k,
                         const Vector& global_field, int ncomp) {
  const auto nodes = box_nodes(p.grid, k.box);
  if (global_field.size() != (Eigen::Index)(p.grid.node_count() * ncomp))
    throw std::invalid_argument("restrict_to_patch: field size mismatch");
  Vector out((Eigen::Index)nodes.size() * ncomp);
  for (size_t i = 0; i < nodes.size(); ++i)
    for (int c = 0; c < ncomp; ++c)
      out((Eigen::Index)i * ncomp + c) = global_field(nodes[i] * ncomp + c);
  return out;
}

Vector extend_by_zero(const Partition& p, const Patch& k,
                      const Vector& local_field, int ncomp) {
  const auto nodes = box_nodes(p.grid, k.box);
  if (local_field.size() != (Eigen::Index)nodes.size() * ncomp)
    throw std::invalid_argument("extend_by_zero: field size mismatch");
  Vector out = Vector::Zero(p.grid.node_count() * ncomp);
  for (size_t i = 0; i < nodes.size(); ++i)
    for (int c = 0; c < ncomp; ++c)
      out(nodes[i] * ncomp + c) = local_field((Eigen::Index)i * ncomp + c);
  return out;
}

Vector pou_blend(const Partition& p, const std::vector<Vector>& locals,
                 int ncomp) {
  if (locals.size() != p.patches.size())
    throw std::invalid_argument("pou_blend: one local field per patch required");
  Vector out = Vector::Zero(p.grid.node_count() * ncomp);
  for (size_t m = 0; m < locals.size(); ++m) {
    const Patch& k = p.patches[m];
    const auto nodes = box_nodes(p.grid, k.box);
    if (locals[m].size() != (Eigen::Index)nodes.size() * ncomp)
      throw std::invalid_argument("pou_blend: local field size mismatch");
    for (size_t i = 0; i < nodes.size(); ++i) {
      const double w = k.chi((Eigen::Index)i);
      for (int c = 0; c < ncomp; ++c)
        out(nodes[i] * ncomp + c) += w * locals[m]((Eigen::Index)i * ncomp + c);
    }
  }
  return out;
}

nlohmann::json partition_to_json(const Partition& p) {
  nlohmann::json j;
  j["grid"] = {{"dim", p.grid.dim},
               {"x", {p.grid.ax[0].lo, p.grid.ax[0].hi}},
               {"cells", {p.grid.ax[0].cells, p.grid.dim == 2 ? p.grid.ax[1].cells : 0}}};
  if (p.grid.dim == 2) j["grid"]["y"] = {p.grid.ax[1].lo, p.grid.ax[1].hi};
  j["counts"] = p.counts;
  j["overlap"] = p.overlap;
  j["owner"] = p.owner;
  j["patches"] = nlohmann::json::array();
  for (const Patch& k : p.patches) {
    nlohmann::json pk;
    pk["id"] = k.id;
    pk["box"] = {{"lo", k.box.lo}, {"hi", k.box.hi}};
    pk["boundary_nodes"] = k.boundary_nodes;
    pk["interior_nodes"] = k.interior_nodes;
    pk["neighbors"] = k.neighbors;
    pk["chi"] = std::vector<double>(k.chi.data(), k.chi.data() + k.chi.size());
    j["patches"].push_back(std::move(pk));
  }
  return j;
}

}  // namespace mspde
