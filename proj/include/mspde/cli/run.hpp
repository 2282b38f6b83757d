#pragma once

#include <string>

#include <json.hpp>

#include "mspde/cli/config.hpp"

namespace mspde {

// Executes the configured pipeline, writes all artifacts plus report.json
// under c.output_dir, and returns the report. The config must already have
// passed validate_config; solver failures mid-run are captured in the report
// (status "failed", flag "partial_artifacts") rather than thrown.
nlohmann::json run_config(const Config& c);

// Relative L2/sup differences of the solution fields of two finished runs
// plus timing ratios. Throws std::runtime_error("compare: incompatible
// grids") when the embedded problem specs disagree.
nlohmann::json compare_runs(const std::string& dir_a, const std::string& dir_b);

}  // namespace mspde
