#pragma once

#include <array>
#include <vector>

#include "mspde/core.hpp"

namespace mspde {

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  int cells = 0;
  double h() const { return (hi - lo) / cells; }
};

// Uniform node lattice on an interval (dim 1) or axis-aligned rectangle
// (dim 2). Nodes are numbered lexicographically with x fastest, and node
// (ix, iy) sits at (lo + ix*h1, lo + iy*h2). Boundary nodes belong to the
// lattice and carry prescribed values exactly.
struct Grid {
  int dim = 0;
  std::array<Axis, 2> ax{};

  static Grid line(double x0, double x1, int cells);
  static Grid line_h(double x0, double x1, double h);  // checks divisibility
  static Grid rect(double x0, double x1, int cx, double y0, double y1, int cy);
  static Grid rect_h(double x0, double x1, double y0, double y1, double h);

  int nodes(int a) const { return ax[a].cells + 1; }
  long node_count() const;
  long node_id(int ix, int iy = 0) const;
  std::array<int, 2> node_coords(long id) const;
  double coord(int a, int i) const { return ax[a].lo + i * ax[a].h(); }
  bool on_global_boundary(long id) const;
};

// Inclusive per-axis node-index ranges. In 1D the second axis is [0, 0].
struct Box {
  std::array<int, 2> lo{0, 0};
  std::array<int, 2> hi{0, 0};

  int nodes(int a) const { return hi[a] - lo[a] + 1; }
  long node_count(int dim) const {
    return dim == 1 ? nodes(0) : (long)nodes(0) * nodes(1);
  }
  bool contains(int ix, int iy) const {
    return ix >= lo[0] && ix <= hi[0] && iy >= lo[1] && iy <= hi[1];
  }
};

// Box nodes in lexicographic order (x fastest), as global node ids.
std::vector<long> box_nodes(const Grid& g, const Box& b);

// Perimeter of a box: 1D gives {left, right}; 2D walks counterclockwise
// from the lowest-index corner (bottom edge, right edge, top, left).
std::vector<long> perimeter_nodes(const Grid& g, const Box& b);

// Local lexicographic index of a node inside a box.
int box_local_id(const Grid& g, const Box& b, long global_id);

}  // namespace mspde
