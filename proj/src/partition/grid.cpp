#include "mspde/partition/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

namespace {

int cells_from_h(double x0, double x1, double h) {
  if (!(h > 0.0) || !(x1 > x0))
    throw std::invalid_argument("grid: need positive extent and h");
  const double ratio = (x1 - x0) / h;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 * ratio || rounded < 1.0)
    throw std::invalid_argument("grid: extent is not an integer number of cells");
  return (int)rounded;
}

void check_cells(int c) {
  if (c < 1) throw std::invalid_argument("grid: need at least one cell");
}

}  // namespace

Grid Grid::line(double x0, double x1, int cells) {
  check_cells(cells);
  if (!(x1 > x0)) throw std::invalid_argument("grid: need positive extent");
  Grid g;
  g.dim = 1;
  g.ax[0] = {x0, x1, cells};
  g.ax[1] = {0.0, 0.0, 0};
  return g;
}

Grid Grid::line_h(double x0, double x1, double h) {
  return line(x0, x1, cells_from_h(x0, x1, h));
}

Grid Grid::rect(double x0, double x1, int cx, double y0, double y1, int cy) {
  check_cells(cx);
  check_cells(cy);
  if (!(x1 > x0) || !(y1 > y0))
    throw std::invalid_argument("grid: need positive extent");
  Grid g;
  g.dim = 2;
  g.ax[0] = {x0, x1, cx};
  g.ax[1] = {y0, y1, cy};
  return g;
}

Grid Grid::rect_h(double x0, double x1, double y0, double y1, double h) {
  return rect(x0, x1, cells_from_h(x0, x1, h), y0, y1, cells_from_h(y0, y1, h));
}

long Grid::node_count() const {
  return dim == 1 ? nodes(0) : (long)nodes(0) * nodes(1);
}

long Grid::node_id(int ix, int iy) const {
  return (long)ix + (long)nodes(0) * iy;
}

std::array<int, 2> Grid::node_coords(long id) const {
  const int nx = nodes(0);
  return {(int)(id % nx), (int)(id / nx)};
}

bool Grid::on_global_boundary(long id) const {
  const auto c = node_coords(id);
  if (c[0] == 0 || c[0] == ax[0].cells) return true;
  if (dim == 2 && (c[1] == 0 || c[1] == ax[1].cells)) return true;
  return false;
}

std::vector<long> box_nodes(const Grid& g, const Box& b) {
  std::vector<long> out;
  out.reserve(b.node_count(g.dim));
  const int y0 = g.dim == 2 ? b.lo[1] : 0;
  const int y1 = g.dim == 2 ? b.hi[1] : 0;
  for (int iy = y0; iy <= y1; ++iy)
    for (int ix = b.lo[0]; ix <= b.hi[0]; ++ix) out.push_back(g.node_id(ix, iy));
  return out;
}

std::vector<long> perimeter_nodes(const Grid& g, const Box& b) {
  std::vector<long> out;
  if (g.dim == 1) {
    out = {g.node_id(b.lo[0]), g.node_id(b.hi[0])};
    return out;
  }
  const int x0 = b.lo[0], x1 = b.hi[0], y0 = b.lo[1], y1 = b.hi[1];
  for (int ix = x0; ix <= x1; ++ix) out.push_back(g.node_id(ix, y0));
  for (int iy = y0 + 1; iy <= y1; ++iy) out.push_back(g.node_id(x1, iy));
  for (int ix = x1 - 1; ix >= x0; --ix) out.push_back(g.node_id(ix, y1));
  for (int iy = y1 - 1; iy >= y0 + 1; --iy) out.push_back(g.node_id(x0, iy));
  return out;
}

int box_local_id(const Grid& g, const Box& b, long global_id) {
  const auto c = g.node_coords(global_id);
  if (!b.contains(c[0], g.dim == 2 ? c[1] : 0))
    throw std::invalid_argument("box_local_id: node outside box");
  const int ix = c[0] - b.lo[0];
  const int iy = g.dim == 2 ? c[1] - b.lo[1] : 0;
  return ix + b.nodes(0) * iy;
}

}  // namespace mspde
