#pragma once

#include "mspde/schwarz/patch_system.hpp"

namespace mspde {

struct SchwarzOptions {
  double tol = 1e-8;  // sup-norm stop on interface change
  int t_max = 200;
  bool record_interfaces = false;  // keep f^t per iteration (tests)
};

struct SchwarzResult {
  Vector u_global;                      // chi-blended final field
  std::vector<double> interface_delta;  // per sweep
  std::vector<double> rel_error;        // per sweep, vs reference if given
  int iterations = 0;
  bool converged = false;
  long iteration_solves = 0;  // fine solves spent inside the loop
  long final_solves = 0;      // fine solves for the final assembly
  std::vector<std::vector<Vector>> interfaces;  // if recorded
};

// Interface data with the global boundary components pinned to phi and all
// interior interface components zeroed.
std::vector<Vector> initial_interface(const PatchSystem& sys, const Vector& phi);

// One Jacobi sweep of the interface update: solve every patch with its
// current data, then overwrite each boundary component with the owning
// neighbor's value. Pinned components are reasserted from phi.
std::vector<Vector> btb_apply(const PatchSystem& sys, const Vector& phi,
                              const std::vector<Vector>& f);

// Fixed-point iteration of btb_apply until the interface change drops below
// tol (or t_max sweeps), then one full solve per patch and a chi blend.
// Not converging within t_max is reported, not thrown. If reference is
// given, the per-sweep relative error of the owner-assembled field is
// recorded alongside the interface deltas.
SchwarzResult schwarz_solve(const PatchSystem& sys, const Vector& phi,
                            const SchwarzOptions& opts,
                            const Vector* reference = nullptr);

namespace detail {

using LocalEval = std::function<Vector(int patch, const Vector& f)>;

SchwarzResult schwarz_iterate(const PatchSystem& sys, const Vector& phi,
                              const SchwarzOptions& opts,
                              const LocalEval& eval_target,
                              const Vector* reference);

}  // namespace detail

}  // namespace mspde
