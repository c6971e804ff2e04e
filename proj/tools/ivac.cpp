// Command-line front end: validate configs, run scenarios, summarise reports.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ivac/report.hpp"
#include "ivac/scenario.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_check_config(const std::string& path) {
  std::vector<std::string> errors;
  const ivac::ScenarioConfig cfg = ivac::load_config(path, errors);
  if (errors.empty())
    for (auto& e : ivac::validate_config(cfg)) errors.push_back(e);
  if (!errors.empty()) {
    for (auto& e : errors) std::cerr << "config error: " << e << "\n";
    return 2;
  }
  std::cout << "config ok: " << path << "\n";
  return 0;
}

int cmd_run(const std::string& scenario, const std::string& config_path, int seed,
            const std::string& out_dir, bool negative_control) {
  if (!ivac::is_scenario(scenario)) {
    std::cerr << "unknown scenario: " << scenario << "\nknown scenarios:";
    for (auto& n : ivac::scenario_names()) std::cerr << " " << n;
    std::cerr << "\n";
    return 2;
  }
  std::vector<std::string> errors;
  ivac::ScenarioConfig cfg = ivac::load_config(config_path, errors);
  if (errors.empty())
    for (auto& e : ivac::validate_config(cfg)) errors.push_back(e);
  if (!errors.empty()) {
    for (auto& e : errors) std::cerr << "config error: " << e << "\n";
    return 2;
  }
  if (!out_dir.empty()) cfg.outputs.dir = out_dir;

  ivac::RunOptions opt;
  opt.seed = seed;
  opt.negative_control = negative_control;

  ivac::ScenarioOutcome outcome;
  try {
    outcome = ivac::run_scenario(scenario, cfg, opt);
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return 2;
  }

  for (auto& l : outcome.lines) std::cout << l << "\n";

  try {
    fs::create_directories(cfg.outputs.dir);
    const std::string stem = negative_control ? scenario + "_control" : scenario;
    const fs::path json_path = fs::path(cfg.outputs.dir) / (stem + ".json");
    ivac::write_text_file(json_path.string(), outcome.report.dump() + "\n");
    std::cout << "report: " << json_path.string() << "\n";
    for (auto& [name, content] : outcome.csv_files) {
      const fs::path p = fs::path(cfg.outputs.dir) / name;
      ivac::write_text_file(p.string(), content);
      std::cout << "table: " << p.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "cannot write outputs: " << e.what() << "\n";
    return 2;
  }

  std::cout << "result: " << (outcome.passed ? "PASS" : "FAIL") << "\n";
  return outcome.passed ? 0 : 1;
}

void summarise(const nlohmann::json& rep, const std::string& file, bool& any_fail) {
  const std::string scen = rep.value("scenario", std::string("?"));
  const bool passed = rep.value("passed", false);
  int n_checks = 0, n_failed = 0;
  std::string failed_names;
  if (rep.contains("checks") && rep["checks"].is_array()) {
    for (const auto& c : rep["checks"]) {
      ++n_checks;
      if (!c.value("passed", false)) {
        ++n_failed;
        if (!failed_names.empty()) failed_names += ", ";
        failed_names += c.value("name", std::string("?"));
      }
    }
  }
  if (!passed) any_fail = true;
  const std::string suffix = failed_names.empty() ? "" : "  [" + failed_names + "]";
  std::printf("%-8s %-22s %3d checks %3d failed  %s%s\n", passed ? "PASS" : "FAIL", scen.c_str(),
              n_checks, n_failed, file.c_str(), suffix.c_str());
  if (rep.contains("scenarios") && rep["scenarios"].is_object())
    for (const auto& [key, sub] : rep["scenarios"].items()) summarise(sub, file + "#" + key, any_fail);
}

int cmd_report(const std::vector<std::string>& paths) {
  bool any_fail = false;
  for (const auto& p : paths) {
    std::ifstream f(p, std::ios::binary);
    if (!f) {
      std::cerr << "cannot open " << p << "\n";
      return 2;
    }
    nlohmann::json rep;
    try {
      f >> rep;
    } catch (const std::exception& e) {
      std::cerr << "cannot parse " << p << ": " << e.what() << "\n";
      return 2;
    }
    summarise(rep, p, any_fail);
  }
  return any_fail ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Infravacuum toolkit: charge detection at infinity and cone-localised intertwiners"};
  app.require_subcommand(1);

  std::string cc_path;
  auto* cc = app.add_subcommand("check-config", "Validate a scenario config file");
  cc->add_option("path", cc_path, "Config file (TOML subset)")->required();

  std::string run_scenario_name, run_config, run_out;
  int run_seed = 0;
  bool run_control = false;
  auto* run = app.add_subcommand("run", "Run a named scenario and write its report");
  run->add_option("scenario", run_scenario_name, "One of: dilation-limit, infravacuum-verify, cone-intertwiner, sector-test, full-suite")->required();
  run->add_option("--config", run_config, "Config file")->required();
  run->add_option("--seed", run_seed, "Seed for randomised probes (default 0)");
  run->add_option("--out", run_out, "Output directory (overrides outputs.dir)");
  run->add_flag("--negative-control", run_control, "Run the scenario's negative control variant");

  std::vector<std::string> report_paths;
  auto* rp = app.add_subcommand("report", "Summarise one or more scenario reports");
  rp->add_option("paths", report_paths, "Report JSON files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (cc->parsed()) return cmd_check_config(cc_path);
  if (run->parsed()) return cmd_run(run_scenario_name, run_config, run_seed, run_out, run_control);
  if (rp->parsed()) return cmd_report(report_paths);
  return 2;
}
