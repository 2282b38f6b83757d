#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mspde/cli/config.hpp"
#include "mspde/cli/run.hpp"

namespace {

// Validation problems exit with 2 and a machine-readable record on stdout;
// runtime failures exit with 1.
int report_error(const std::string& kind, const std::string& what) {
  nlohmann::json rec;
  rec["error"] = kind;
  rec["message"] = what;
  std::cout << rec.dump(2) << "\n";
  return kind == "validation" ? 2 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiscale PDE experiment harness"};
  app.require_subcommand(1);

  std::string run_path;
  auto* run_cmd = app.add_subcommand("run", "execute a configured pipeline");
  run_cmd->add_option("config", run_path, "config JSON path")->required();

  std::string validate_path;
  auto* val_cmd = app.add_subcommand("validate", "check a config without running");
  val_cmd->add_option("config", validate_path, "config JSON path")->required();

  std::string cmp_a, cmp_b, metric = "l2";
  auto* cmp_cmd = app.add_subcommand("compare", "diff two finished runs");
  cmp_cmd->add_option("run_a", cmp_a, "first run directory")->required();
  cmp_cmd->add_option("run_b", cmp_b, "second run directory")->required();
  cmp_cmd->add_option("--metric", metric, "headline metric: l2 | sup")
      ->check(CLI::IsMember({"l2", "sup"}));

  CLI11_PARSE(app, argc, argv);

  if (val_cmd->parsed()) {
    try {
      mspde::Config c = mspde::load_config(validate_path);
      mspde::validate_config(c);
    } catch (const std::exception& e) {
      return report_error("validation", e.what());
    }
    nlohmann::json rec;
    rec["status"] = "ok";
    std::cout << rec.dump(2) << "\n";
    return 0;
  }

  if (run_cmd->parsed()) {
    mspde::Config c;
    try {
      c = mspde::load_config(run_path);
      mspde::validate_config(c);
    } catch (const std::exception& e) {
      return report_error("validation", e.what());
    }
    nlohmann::json report;
    try {
      report = mspde::run_config(c);
    } catch (const std::exception& e) {
      return report_error("runtime", e.what());
    }
    std::cout << report.dump(2) << "\n";
    return report.value("status", "") == "ok" ? 0 : 1;
  }

  try {
    nlohmann::json out = mspde::compare_runs(cmp_a, cmp_b);
    out["metric"] = metric;
    if (out.contains("solution"))
      out["difference"] = metric == "l2" ? out["solution"]["rel_l2"]
                                         : out["solution"]["rel_sup"];
    std::cout << out.dump(2) << "\n";
  } catch (const std::exception& e) {
    return report_error("runtime", e.what());
  }
  return 0;
}
