#include "mspde/schwarz/schwarz.hpp"

#include <cmath>
#include <stdexcept>

namespace mspde {

std::vector<Vector> initial_interface(const PatchSystem& sys,
                                      const Vector& phi) {
  if (phi.size() != sys.phi_size)
    throw std::invalid_argument("initial_interface: phi size mismatch");
  std::vector<Vector> f(sys.locals.size());
  for (size_t m = 0; m < sys.locals.size(); ++m)
    f[m] = Vector::Zero(sys.locals[m].n_boundary);
  for (const Pin& p : sys.pins) f[p.patch](p.comp) = phi(p.phi_idx);
  return f;
}

namespace detail {

namespace {

std::vector<Vector> sweep(const PatchSystem& sys, const Vector& phi,
                          const std::vector<Vector>& f,
                          const std::vector<Vector>& targets) {
  std::vector<Vector> next = f;
  for (const TraceWrite& w : sys.writes)
    next[w.dst_patch](w.dst_comp) = targets[w.src_patch](w.src_target);
  for (const Pin& p : sys.pins) next[p.patch](p.comp) = phi(p.phi_idx);
  return next;
}

double rel_error_on_covered(const PatchSystem& sys, const Vector& phi,
                            const std::vector<Vector>& targets,
                            const Vector& ref) {
  double num = 0.0, den = 0.0;
  Vector own = Vector::Zero(sys.global_size);
  for (size_t m = 0; m < sys.locals.size(); ++m) {
    const PatchLocal& L = sys.locals[m];
    for (size_t i = 0; i < L.target_to_global.size(); ++i)
      own(L.target_to_global[i]) = targets[m]((Eigen::Index)i);
  }
  for (const Pin& p : sys.pins)
    own(sys.locals[p.patch].full_to_global[p.full_idx]) = phi(p.phi_idx);
  for (long i = 0; i < sys.global_size; ++i) {
    if (!sys.covered[i]) continue;
    const double d = own(i) - ref(i);
    num += d * d;
    den += ref(i) * ref(i);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

SchwarzResult schwarz_iterate(const PatchSystem& sys, const Vector& phi,
                              const SchwarzOptions& opts,
                              const LocalEval& eval_target,
                              const Vector* reference) {
  if (reference && reference->size() != sys.global_size)
    throw std::invalid_argument("schwarz: reference size mismatch");
  SchwarzResult res;
  const long solves0 = sys.total_fine_solves();

  std::vector<Vector> f = initial_interface(sys, phi);
  if (opts.record_interfaces) res.interfaces.push_back(f);

  std::vector<Vector> targets(sys.locals.size());
  for (int t = 1; t <= opts.t_max; ++t) {
    for (size_t m = 0; m < sys.locals.size(); ++m)
      targets[m] = eval_target((int)m, f[m]);

    const std::vector<Vector> fn = sweep(sys, phi, f, targets);
    double delta = 0.0;
    for (size_t m = 0; m < f.size(); ++m) {
      const double d = (fn[m] - f[m]).lpNorm<Eigen::Infinity>();
      delta = std::max(delta, d);
    }
    res.interface_delta.push_back(delta);
    if (reference)
      res.rel_error.push_back(
          rel_error_on_covered(sys, phi, targets, *reference));
    f = fn;
    if (opts.record_interfaces) res.interfaces.push_back(f);
    res.iterations = t;
    if (delta <= opts.tol) {
      res.converged = true;
      break;
    }
  }

  const long solves1 = sys.total_fine_solves();
  // final assembly always uses full local solves, also for reduced runs
  std::vector<Vector> fulls(sys.locals.size());
  for (size_t m = 0; m < sys.locals.size(); ++m)
    fulls[m] = sys.locals[m].solve_full(f[m]);
  const long solves2 = sys.total_fine_solves();
  res.iteration_solves = solves1 - solves0;
  res.final_solves = solves2 - solves1;

  res.u_global = Vector::Zero(sys.global_size);
  for (size_t m = 0; m < sys.locals.size(); ++m) {
    const PatchLocal& L = sys.locals[m];
    for (int i = 0; i < L.n_full; ++i)
      res.u_global(L.full_to_global[i]) += L.chi_full(i) * fulls[m](i);
  }
  return res;
}

}  // namespace detail

std::vector<Vector> btb_apply(const PatchSystem& sys, const Vector& phi,
                              const std::vector<Vector>& f) {
  if (f.size() != sys.locals.size())
    throw std::invalid_argument("btb_apply: one interface vector per patch");
  std::vector<Vector> targets(sys.locals.size());
  for (size_t m = 0; m < sys.locals.size(); ++m) {
    if (f[m].size() != sys.locals[m].n_boundary)
      throw std::invalid_argument("btb_apply: interface size mismatch");
    targets[m] = sys.locals[m].apply_S(f[m]);
  }
  std::vector<Vector> next = f;
  for (const TraceWrite& w : sys.writes)
    next[w.dst_patch](w.dst_comp) = targets[w.src_patch](w.src_target);
  for (const Pin& p : sys.pins) next[p.patch](p.comp) = phi(p.phi_idx);
  return next;
}

SchwarzResult schwarz_solve(const PatchSystem& sys, const Vector& phi,
                            const SchwarzOptions& opts,
                            const Vector* reference) {
  detail::LocalEval eval = [&sys](int m, const Vector& f) {
    const PatchLocal& L = sys.locals[m];
    const Vector full = L.solve_full(f);
    Vector t(L.n_target);
    for (int i = 0; i < L.n_target; ++i) t(i) = full(L.target_to_full[i]);
    return t;
  };
  return detail::schwarz_iterate(sys, phi, opts, eval, reference);
}

}  // namespace mspde
