#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "mspde/core.hpp"
#include "mspde/partition/grid.hpp"
#include "mspde/rte/ordinates.hpp"

namespace mspde {

// Parsed run configuration (schema_version 1). See README for the schema.
struct Config {
  std::uint64_t seed = 0;
  std::string family;  // elliptic | rte | semilinear | synthetic

  std::array<int, 2> cells{0, 0};
  std::array<std::array<double, 2>, 2> domain{{{0.0, 1.0}, {0.0, 1.0}}};

  std::string media_preset = "constant";
  double epsilon = 1.0;

  std::string kernel_kind = "isotropic_diffusive";
  double kernel_epsilon = 1.0;
  double sigma = 1.0;
  double hg_g = 0.5;
  double eps1 = 1.0, eps2 = 1.0;
  int ordinates = 16;

  std::string boundary_preset = "zero";
  std::vector<double> boundary_values;

  std::array<int, 2> patch_counts{1, 1};
  int overlap = 2;

  std::string method;  // direct | basis | schwarz | reduced_schwarz | manifold | svd_bench
  int k = 50;
  std::string basis_kind = "random";
  double boundary_weight = 10.0;
  int r = 10, p = 5;
  double tol = 1e-8;
  int t_max = 200;
  double source = 0.0;

  int samples = 200;
  int knn_k = 8;
  int queries = 20;
  int probe_center = 0;
  double probe_radius_frac = 0.5;
  int modes = 2;
  double amplitude = 1.0;

  int trials = 20;
  int bench_rows = 200, bench_cols = 100;

  bool compare_to_direct = false;
  std::string output_dir = "out";

  nlohmann::json raw;  // verbatim input, echoed into the report
};

Config parse_config(const nlohmann::json& j);
Config load_config(const std::string& path);

// Static validation beyond field parsing: dimensional consistency, preset
// existence, partition feasibility. Throws std::invalid_argument.
void validate_config(const Config& c);

// The portable problem identity embedded in manifests and reports; two runs
// are comparable exactly when their specs match.
nlohmann::json problem_spec(const Config& c);

Grid make_grid(const Config& c);

// Global boundary data for the configured problem.
Vector make_elliptic_phi(const Config& c, const Grid& g);
Vector make_rte_phi(const Config& c, const OrdinateSet& ords);

}  // namespace mspde
