#include "mspde/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "mspde/elliptic/media.hpp"
#include "mspde/partition/partition.hpp"
#include "mspde/rte/kernel.hpp"
#include "mspde/schwarz/patch_system.hpp"

namespace mspde {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("config: " + msg); }

const json& need(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

double num(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_number()) bad(std::string("'") + key + "' must be a number");
  return v.get<double>();
}

double num_or(const json& j, const char* key, double def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number()) bad(std::string("'") + key + "' must be a number");
  return it->get<double>();
}

int int_or(const json& j, const char* key, int def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_number_integer()) bad(std::string("'") + key + "' must be an integer");
  return it->get<int>();
}

std::string str(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_string()) bad(std::string("'") + key + "' must be a string");
  return v.get<std::string>();
}

std::string str_or(const json& j, const char* key, const std::string& def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  if (!it->is_string()) bad(std::string("'") + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

Config parse_config(const json& j) {
  if (!j.is_object()) bad("top level must be an object");
  {
    const json& sv = need(j, "schema_version");
    if (!sv.is_number_integer() || sv.get<int>() != 1) bad("unsupported schema_version (expected 1)");
  }

  Config c;
  c.raw = j;
  {
    const json& s = need(j, "seed");
    if (!s.is_number_unsigned() && !s.is_number_integer()) bad("'seed' must be an integer");
    if (s.is_number_integer() && s.get<long long>() < 0) bad("'seed' must be nonnegative");
    c.seed = s.get<std::uint64_t>();
  }
  c.family = str(j, "family");
  c.method = str(j, "method");
  c.output_dir = str_or(j, "output_dir", c.output_dir);
  if (c.output_dir.empty()) bad("'output_dir' must be nonempty");

  if (c.family != "synthetic") {
    const json& g = need(j, "grid");
    const json& cells = need(g, "cells");
    if (!cells.is_array() || cells.empty() || cells.size() > 2) bad("'grid.cells' must be a 1- or 2-element array");
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!cells[i].is_number_integer()) bad("'grid.cells' entries must be integers");
      c.cells[i] = cells[i].get<int>();
    }
    if (cells.size() == 1) c.cells[1] = 0;
    auto it = g.find("domain");
    if (it != g.end()) {
      const json& d = *it;
      if (!d.is_array() || d.size() != cells.size()) bad("'grid.domain' must match 'grid.cells' in length");
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i].is_array() || d[i].size() != 2) bad("'grid.domain' entries must be [lo, hi] pairs");
        c.domain[i] = {d[i][0].get<double>(), d[i][1].get<double>()};
      }
    }
  }

  if (auto it = j.find("media"); it != j.end()) {
    c.media_preset = str(*it, "preset");
    c.epsilon = num_or(*it, "epsilon", c.epsilon);
  }
  if (auto it = j.find("kernel"); it != j.end()) {
    const json& k = *it;
    c.kernel_kind = str(k, "kind");
    c.kernel_epsilon = num_or(k, "epsilon", c.kernel_epsilon);
    c.sigma = num_or(k, "sigma", c.sigma);
    c.hg_g = num_or(k, "g", c.hg_g);
    c.eps1 = num_or(k, "eps1", c.eps1);
    c.eps2 = num_or(k, "eps2", c.eps2);
  }
  c.ordinates = int_or(j, "ordinates", c.ordinates);

  if (auto it = j.find("boundary"); it != j.end()) {
    c.boundary_preset = str(*it, "preset");
    if (auto vv = it->find("values"); vv != it->end()) {
      if (!vv->is_array()) bad("'boundary.values' must be an array of numbers");
      for (const auto& e : *vv) {
        if (!e.is_number()) bad("'boundary.values' must be an array of numbers");
        c.boundary_values.push_back(e.get<double>());
      }
    }
  }

  if (auto it = j.find("partition"); it != j.end()) {
    const json& p = *it;
    const json& counts = need(p, "counts");
    if (!counts.is_array() || counts.empty() || counts.size() > 2) bad("'partition.counts' must be a 1- or 2-element array");
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (!counts[i].is_number_integer()) bad("'partition.counts' entries must be integers");
      c.patch_counts[i] = counts[i].get<int>();
    }
    if (counts.size() == 1) c.patch_counts[1] = 1;
    c.overlap = int_or(p, "overlap", c.overlap);
  }

  if (auto it = j.find("method_options"); it != j.end()) {
    const json& m = *it;
    c.k = int_or(m, "k", c.k);
    c.basis_kind = str_or(m, "basis_kind", c.basis_kind);
    c.boundary_weight = num_or(m, "boundary_weight", c.boundary_weight);
    c.r = int_or(m, "r", c.r);
    c.p = int_or(m, "p", c.p);
    c.tol = num_or(m, "tol", c.tol);
    c.t_max = int_or(m, "t_max", c.t_max);
    c.samples = int_or(m, "samples", c.samples);
    c.knn_k = int_or(m, "knn_k", c.knn_k);
    c.queries = int_or(m, "queries", c.queries);
    c.probe_center = int_or(m, "probe_center", c.probe_center);
    c.probe_radius_frac = num_or(m, "probe_radius_frac", c.probe_radius_frac);
    c.modes = int_or(m, "modes", c.modes);
    c.amplitude = num_or(m, "amplitude", c.amplitude);
    c.trials = int_or(m, "trials", c.trials);
    c.bench_rows = int_or(m, "rows", c.bench_rows);
    c.bench_cols = int_or(m, "cols", c.bench_cols);
    if (auto cd = m.find("compare_to_direct"); cd != m.end()) {
      if (!cd->is_boolean()) bad("'method_options.compare_to_direct' must be a boolean");
      c.compare_to_direct = cd->get<bool>();
    }
  }
  c.source = num_or(j, "source", c.source);
  return c;
}

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    bad(std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

void validate_config(const Config& c) {
  static const std::set<std::string> families = {"elliptic", "rte", "semilinear", "synthetic"};
  static const std::set<std::string> methods = {"direct", "basis", "schwarz", "reduced_schwarz", "manifold", "svd_bench"};
  if (!families.count(c.family)) bad("unknown family '" + c.family + "'");
  if (!methods.count(c.method)) bad("unknown method '" + c.method + "'");

  if (c.method == "svd_bench") {
    if (c.family != "synthetic") bad("method 'svd_bench' requires family 'synthetic'");
    if (c.bench_rows < 1 || c.bench_cols < 1) bad("bench matrix must be nonempty");
    if (c.trials < 1) bad("'trials' must be >= 1");
    if (c.r < 1 || c.p < 2) bad("'r' must be >= 1 and 'p' >= 2 for svd_bench");
    if (c.r + c.p > std::min(c.bench_rows, c.bench_cols)) bad("r + p exceeds bench matrix rank");
    return;
  }
  if (c.family == "synthetic") bad("family 'synthetic' only supports method 'svd_bench'");

  const int dim = c.cells[1] > 0 ? 2 : 1;
  if (c.cells[0] < 1 || (dim == 2 && c.cells[1] < 1)) bad("'grid.cells' must be positive");
  for (int a = 0; a < dim; ++a)
    if (!(c.domain[a][0] < c.domain[a][1])) bad("'grid.domain' must have lo < hi");

  if (c.family == "elliptic") {
    media_preset(c.media_preset, c.epsilon);  // throws on unknown preset
    static const std::set<std::string> bps = {"zero", "constant", "affine", "trig"};
    if (!bps.count(c.boundary_preset)) bad("unknown elliptic boundary preset '" + c.boundary_preset + "'");
  } else if (c.family == "rte") {
    if (dim != 1) bad("family 'rte' requires a 1-d grid");
    if (c.ordinates < 2 || c.ordinates % 2 != 0) bad("'ordinates' must be even and >= 2");
    static const std::set<std::string> kinds = {"isotropic_diffusive", "heterogeneous", "henyey_greenstein"};
    if (!kinds.count(c.kernel_kind)) bad("unknown kernel kind '" + c.kernel_kind + "'");
    if (c.kernel_epsilon <= 0.0) bad("'kernel.epsilon' must be positive");
    if (c.kernel_kind == "henyey_greenstein" && std::abs(c.hg_g) >= 1.0) bad("'kernel.g' must satisfy |g| < 1");
    static const std::set<std::string> bps = {"zero", "constant_sides", "ramp_sides"};
    if (!bps.count(c.boundary_preset)) bad("unknown rte boundary preset '" + c.boundary_preset + "'");
  } else if (c.family == "semilinear") {
    if (dim != 1) bad("family 'semilinear' requires a 1-d grid");
    if (c.method != "manifold" && c.method != "direct") bad("family 'semilinear' supports methods 'direct' and 'manifold'");
  }

  if (c.method == "manifold") {
    if (c.family != "semilinear") bad("method 'manifold' requires family 'semilinear'");
    if (c.samples < 1) bad("'samples' must be >= 1");
    if (c.knn_k < 1 || c.knn_k > c.samples) bad("'knn_k' must be in [1, samples]");
    if (c.queries < 1) bad("'queries' must be >= 1");
    if (c.probe_center < 0 || c.probe_center >= c.samples) bad("'probe_center' must index a sample");
    if (!(c.probe_radius_frac > 0.0 && c.probe_radius_frac <= 1.0)) bad("'probe_radius_frac' must be in (0, 1]");
    if (c.modes < 1) bad("'modes' must be >= 1");
  }

  const bool partitioned = c.method == "basis" || c.method == "schwarz" || c.method == "reduced_schwarz";
  if (partitioned) {
    if (c.family == "semilinear") bad("method '" + c.method + "' requires family 'elliptic' or 'rte'");
    Grid g = make_grid(c);
    std::array<int, 2> counts = c.patch_counts;
    if (dim == 1) counts[1] = 1;
    Partition part;
    try {
      part = build_partition(g, counts, c.overlap);
    } catch (const std::exception& e) {
      bad(std::string("infeasible partition: ") + e.what());
    }
    if (c.method == "reduced_schwarz") {
      if (c.r < 1 || c.p < 1) bad("'r' and 'p' must be >= 1");
      for (const Patch& pt : part.patches) {
        int nb = static_cast<int>(pt.boundary_nodes.size());
        if (c.family == "rte") {
          // confined map inputs are the incoming half-ordinates on each end
          nb = c.ordinates;
        }
        if (c.r + c.p > nb)
          bad("r + p exceeds the boundary dimension of patch " + std::to_string(pt.id));
      }
    }
    if (c.method == "basis" && c.k < 1) bad("'k' must be >= 1");
    if (c.method == "basis" && c.basis_kind != "random" && c.basis_kind != "full")
      bad("unknown basis_kind '" + c.basis_kind + "'");
  }
  if (partitioned && c.source != 0.0)
    bad("interior source terms are only supported by method 'direct'");
  if (c.tol <= 0.0) bad("'tol' must be positive");
  if (c.t_max < 1) bad("'t_max' must be >= 1");
}

nlohmann::json problem_spec(const Config& c) {
  json s;
  s["family"] = c.family;
  if (c.family == "synthetic") {
    s["rows"] = c.bench_rows;
    s["cols"] = c.bench_cols;
    return s;
  }
  const int dim = c.cells[1] > 0 ? 2 : 1;
  json grid;
  grid["cells"] = dim == 2 ? json::array({c.cells[0], c.cells[1]}) : json::array({c.cells[0]});
  json dom = json::array();
  for (int a = 0; a < dim; ++a) dom.push_back(json::array({c.domain[a][0], c.domain[a][1]}));
  grid["domain"] = dom;
  s["grid"] = grid;
  if (c.family == "elliptic" || c.family == "semilinear") {
    s["media"] = {{"preset", c.media_preset}, {"epsilon", c.epsilon}};
  }
  if (c.family == "rte") {
    json k;
    k["kind"] = c.kernel_kind;
    k["epsilon"] = c.kernel_epsilon;
    if (c.kernel_kind == "isotropic_diffusive") k["sigma"] = c.sigma;
    if (c.kernel_kind == "henyey_greenstein") k["g"] = c.hg_g;
    if (c.kernel_kind == "heterogeneous") {
      k["eps1"] = c.eps1;
      k["eps2"] = c.eps2;
    }
    s["kernel"] = k;
    s["ordinates"] = c.ordinates;
  }
  if (c.method == "basis" || c.method == "schwarz" || c.method == "reduced_schwarz") {
    const int dim2 = c.cells[1] > 0 ? 2 : 1;
    json pc = dim2 == 2 ? json::array({c.patch_counts[0], c.patch_counts[1]}) : json::array({c.patch_counts[0]});
    s["partition"] = {{"counts", pc}, {"overlap", c.overlap}};
  }
  s["boundary"] = {{"preset", c.boundary_preset}, {"values", c.boundary_values}};
  return s;
}

Grid make_grid(const Config& c) {
  if (c.cells[1] > 0)
    return Grid::rect(c.domain[0][0], c.domain[0][1], c.cells[0], c.domain[1][0], c.domain[1][1], c.cells[1]);
  return Grid::line(c.domain[0][0], c.domain[0][1], c.cells[0]);
}

Vector make_elliptic_phi(const Config& c, const Grid& g) {
  const std::vector<double>& v = c.boundary_values;
  auto at = [&](std::size_t i, double def) { return i < v.size() ? v[i] : def; };
  if (c.boundary_preset == "zero") return elliptic_phi(g, [](double, double) { return 0.0; });
  if (c.boundary_preset == "constant") {
    const double c0 = at(0, 1.0);
    return elliptic_phi(g, [c0](double, double) { return c0; });
  }
  if (c.boundary_preset == "affine") {
    const double c0 = at(0, 0.0), c1 = at(1, 1.0), c2 = at(2, 0.0);
    return elliptic_phi(g, [=](double x, double y) { return c0 + c1 * x + c2 * y; });
  }
  if (c.boundary_preset == "trig") {
    const double a = at(0, 1.0);
    return elliptic_phi(g, [a](double x, double y) {
      return a * (std::cos(2.0 * M_PI * x) + std::sin(2.0 * M_PI * y));
    });
  }
  throw std::invalid_argument("config: unknown elliptic boundary preset '" + c.boundary_preset + "'");
}

Vector make_rte_phi(const Config& c, const OrdinateSet& ords) {
  const std::vector<double>& v = c.boundary_values;
  auto at = [&](std::size_t i, double def) { return i < v.size() ? v[i] : def; };
  if (c.boundary_preset == "zero") return rte_phi(ords, [](int, double) { return 0.0; });
  if (c.boundary_preset == "constant_sides") {
    const double cl = at(0, 1.0), cr = at(1, 0.0);
    return rte_phi(ords, [=](int side, double) { return side == 0 ? cl : cr; });
  }
  if (c.boundary_preset == "ramp_sides") {
    const double cl = at(0, 1.0), cr = at(1, 0.0);
    return rte_phi(ords, [=](int side, double vj) {
      const double s = side == 0 ? cl : cr;
      return s * (1.0 + 0.5 * std::abs(vj));
    });
  }
  throw std::invalid_argument("config: unknown rte boundary preset '" + c.boundary_preset + "'");
}

}  // namespace mspde
