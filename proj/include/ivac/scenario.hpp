#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ivac/report.hpp"

namespace ivac {

// Configuration blocks, mirroring the sections of the TOML-style file.
struct GridBlock {
  double eps1 = 1.0;
  double q_ratio = 0.5;
  int n_shells = 20;
  int nodes_per_shell = 16;
  double uv_cutoff = 64.0;
};

struct KprBlock {
  double b_alpha = 1.0;
  int l_cap = 64;
  int l_max = 16;                       // angular truncation of the mode space
  std::string conjugation = "position";  // or "momentum"
};

struct ChargeBlock {
  double q = 1.0, r1 = 1.0, r2 = 2.0;
  // Partner charge for sector comparisons.
  double q2 = 2.0, r1_2 = 1.5, r2_2 = 3.0;
};

struct ConeBlock {
  double theta0_deg = 30.0;
  double sharpness = 1.0;
  std::string axis = "z";
};

struct ProbeBlock {
  double h_r_lo = 1.0, h_r_hi = 2.0, h_amp = 1.0;
  bool isotropic = false;
  double cap_edge_deg = 60.0, cap_inner_deg = 120.0;
  bool with_g = false;
  double g_r_lo = 1.0, g_r_hi = 2.0, g_amp = 1.0;
};

struct OutputBlock {
  std::string dir = "out";
  bool write_csv = true;
};

struct ScenarioConfig {
  GridBlock grid;
  KprBlock kpr;
  ChargeBlock charge;
  ConeBlock cone;
  ProbeBlock probe;
  OutputBlock outputs;
};

// Parses the key = value / [section] subset of TOML used by the config
// files.  Unknown sections or keys, bad literals, and duplicate keys are
// reported as errors; on error the returned config is the default one.
ScenarioConfig parse_config(const std::string& text, std::vector<std::string>& errors);
ScenarioConfig load_config(const std::string& path, std::vector<std::string>& errors);

// Semantic validation (ranges, orderings, admissibility of the shell
// ladder).  Empty result means runnable.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

struct RunOptions {
  std::uint64_t seed = 0;
  bool negative_control = false;
};

struct ScenarioOutcome {
  bool passed = false;
  Json report;                     // full machine-readable result
  std::vector<std::string> lines;  // human-readable check lines
  // Auxiliary sequence files (name, csv content), written by the CLI.
  std::vector<std::pair<std::string, std::string>> csv_files;
};

const std::vector<std::string>& scenario_names();
bool is_scenario(const std::string& name);

// Runs one named scenario ("dilation-limit", "infravacuum-verify",
// "cone-intertwiner", "sector-test", "full-suite").  Throws
// std::invalid_argument for unknown names or unrunnable configs.
ScenarioOutcome run_scenario(const std::string& name, const ScenarioConfig& cfg,
                             const RunOptions& opt);

}  // namespace ivac
