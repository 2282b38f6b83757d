#include "mspde/schwarz/patch_system.hpp"

#include <stdexcept>
#include <unordered_map>

namespace mspde {

long PatchSystem::total_fine_solves() const {
  long n = 0;
  for (const auto& l : locals) n += l.solve_counter();
  return n;
}

PatchSystem build_elliptic_system(const Partition& part,
                                  const MediaField& media) {
  PatchSystem sys;
  sys.part = part;
  sys.ncomp = 1;
  sys.global_size = part.grid.node_count();
  const Grid& g = part.grid;

  Box whole;
  whole.hi[0] = g.ax[0].cells;
  if (g.dim == 2) whole.hi[1] = g.ax[1].cells;
  const auto global_perimeter = perimeter_nodes(g, whole);
  sys.phi_size = (int)global_perimeter.size();
  std::unordered_map<long, int> phi_of_node;
  for (size_t i = 0; i < global_perimeter.size(); ++i)
    phi_of_node[global_perimeter[i]] = (int)i;

  // owned nodes minus the global boundary form each patch's target set
  std::vector<std::vector<long>> target(part.patches.size());
  std::vector<std::unordered_map<long, int>> target_pos(part.patches.size());
  for (long n = 0; n < g.node_count(); ++n) {
    if (g.on_global_boundary(n)) continue;
    const int m = part.owner[n];
    target_pos[m][n] = (int)target[m].size();
    target[m].push_back(n);
  }

  sys.covered.assign(sys.global_size, 0);
  sys.locals.resize(part.patches.size());
  for (const Patch& k : part.patches) {
    auto solver = std::make_shared<LocalEllipticSolver>(g, k.box, media,
                                                        target[k.id]);
    sys.keep_alive.push_back(solver);
    PatchLocal& L = sys.locals[k.id];
    L.id = k.id;
    L.n_boundary = solver->n_boundary();
    L.n_full = solver->n_full();
    L.n_target = solver->n_target();
    L.solve_full = [solver](const Vector& f) { return solver->solve_dirichlet(f); };
    L.apply_S = [solver](const Vector& f) { return solver->apply_confined(f); };
    L.apply_ST = [solver](const Vector& t) {
      return solver->apply_confined_transpose(t);
    };
    L.solve_counter = [solver]() { return solver->solve_count(); };
    const auto nodes = box_nodes(g, k.box);
    L.full_to_global.assign(nodes.begin(), nodes.end());
    for (long n : target[k.id]) {
      L.target_to_full.push_back(box_local_id(g, k.box, n));
      L.target_to_global.push_back(n);
      sys.covered[n] = 1;
    }
    L.chi_full = k.chi;

    for (size_t c = 0; c < k.boundary_nodes.size(); ++c) {
      const long n = k.boundary_nodes[c];
      if (g.on_global_boundary(n)) {
        Pin p;
        p.patch = k.id;
        p.comp = (int)c;
        p.full_idx = box_local_id(g, k.box, n);
        p.phi_idx = phi_of_node.at(n);
        sys.pins.push_back(p);
        sys.covered[n] = 1;
      } else {
        const int owner = part.owner[n];
        if (owner == k.id)
          throw std::logic_error("patch owns a node of its own boundary");
        TraceWrite w;
        w.src_patch = owner;
        w.src_target = target_pos[owner].at(n);
        w.dst_patch = k.id;
        w.dst_comp = (int)c;
        sys.writes.push_back(w);
      }
    }
  }
  return sys;
}

Vector elliptic_phi(const Grid& grid,
                    const std::function<double(double, double)>& f) {
  Box whole;
  whole.hi[0] = grid.ax[0].cells;
  if (grid.dim == 2) whole.hi[1] = grid.ax[1].cells;
  const auto nodes = perimeter_nodes(grid, whole);
  Vector phi((Eigen::Index)nodes.size());
  for (size_t i = 0; i < nodes.size(); ++i) {
    const auto c = grid.node_coords(nodes[i]);
    phi((Eigen::Index)i) =
        f(grid.coord(0, c[0]), grid.dim == 2 ? grid.coord(1, c[1]) : 0.0);
  }
  return phi;
}

PatchSystem build_rte_system(const Partition& part,
                             const CollisionKernel& kernel,
                             const OrdinateSet& ordinates) {
  if (part.grid.dim != 1)
    throw std::invalid_argument("build_rte_system: needs a 1D partition");
  PatchSystem sys;
  sys.part = part;
  const int nv = ordinates.size();
  sys.ncomp = nv;
  const Grid& g = part.grid;
  sys.global_size = g.node_count() * nv;
  sys.phi_size = nv;

  std::vector<std::vector<long>> target(part.patches.size());
  std::vector<std::unordered_map<long, int>> target_pos(part.patches.size());
  for (long n = 0; n < g.node_count(); ++n) {
    if (g.on_global_boundary(n)) continue;
    const int m = part.owner[n];
    target_pos[m][n] = (int)target[m].size();
    target[m].push_back(n);
  }

  // phi slot per (side, ordinate): left v > 0 ascending, then right v < 0
  std::vector<int> phi_left(nv, -1), phi_right(nv, -1);
  {
    int s = 0;
    for (int j = 0; j < nv; ++j)
      if (ordinates.v(j) > 0.0) phi_left[j] = s++;
    for (int j = 0; j < nv; ++j)
      if (ordinates.v(j) < 0.0) phi_right[j] = s++;
  }

  sys.covered.assign(sys.global_size, 0);
  sys.locals.resize(part.patches.size());
  for (const Patch& k : part.patches) {
    auto solver = std::make_shared<LocalRteSolver>(g, k.box, kernel, ordinates,
                                                   target[k.id]);
    sys.keep_alive.push_back(solver);
    PatchLocal& L = sys.locals[k.id];
    L.id = k.id;
    L.n_boundary = solver->n_incoming();
    L.n_full = solver->n_full();
    L.n_target = solver->n_target();
    L.solve_full = [solver](const Vector& f) { return solver->solve_transport(f); };
    L.apply_S = [solver](const Vector& f) { return solver->apply_confined(f); };
    L.apply_ST = [solver](const Vector& t) {
      return solver->apply_confined_transpose(t);
    };
    L.solve_counter = [solver]() { return solver->solve_count(); };
    const auto xnodes = box_nodes(g, k.box);
    L.full_to_global.resize((size_t)xnodes.size() * nv);
    for (size_t i = 0; i < xnodes.size(); ++i)
      for (int j = 0; j < nv; ++j)
        L.full_to_global[i * nv + j] = xnodes[i] * nv + j;
    for (long n : target[k.id]) {
      const int lx = box_local_id(g, k.box, n);
      for (int j = 0; j < nv; ++j) {
        L.target_to_full.push_back(lx * nv + j);
        L.target_to_global.push_back(n * nv + j);
        sys.covered[n * nv + j] = 1;
      }
    }
    L.chi_full.resize((Eigen::Index)xnodes.size() * nv);
    for (size_t i = 0; i < xnodes.size(); ++i)
      L.chi_full.segment((Eigen::Index)i * nv, nv).setConstant(k.chi((Eigen::Index)i));

    const auto& pairs = solver->incoming_pairs();
    for (size_t c = 0; c < pairs.size(); ++c) {
      const auto [lx, j] = pairs[c];
      const long xnode = xnodes[lx];
      if (g.on_global_boundary(xnode)) {
        const auto coords = g.node_coords(xnode);
        const bool left = coords[0] == 0;
        Pin p;
        p.patch = k.id;
        p.comp = (int)c;
        p.full_idx = lx * nv + j;
        p.phi_idx = left ? phi_left[j] : phi_right[j];
        if (p.phi_idx < 0)
          throw std::logic_error("incoming slot does not face the domain boundary");
        sys.pins.push_back(p);
        sys.covered[xnode * nv + j] = 1;
      } else {
        const int owner = part.owner[xnode];
        TraceWrite w;
        w.src_patch = owner;
        w.src_target = target_pos[owner].at(xnode) * nv + j;
        w.dst_patch = k.id;
        w.dst_comp = (int)c;
        sys.writes.push_back(w);
      }
    }
  }
  return sys;
}

Vector rte_phi(const OrdinateSet& ordinates,
               const std::function<double(int side, double v)>& f) {
  const int nv = ordinates.size();
  std::vector<double> vals;
  for (int j = 0; j < nv; ++j)
    if (ordinates.v(j) > 0.0) vals.push_back(f(0, ordinates.v(j)));
  for (int j = 0; j < nv; ++j)
    if (ordinates.v(j) < 0.0) vals.push_back(f(1, ordinates.v(j)));
  Vector phi((Eigen::Index)vals.size());
  for (size_t i = 0; i < vals.size(); ++i) phi((Eigen::Index)i) = vals[i];
  return phi;
}

}  // namespace mspde
