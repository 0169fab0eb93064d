#pragma once

// Batch pipeline behind the heislift command line tool.
//
// Config (JSON, paths relative to the config file):
//   {
//     "m": 2, "n": 1,
//     "omega": {"lo": [-1, -1], "hi": [1, 1]},
//     "target": {"kind": "heisenberg"},            // or {"kind": "euclidean", "dim": d}
//     "data": "z.csv",                              // rows: m site coords, then target coords
//     "max_generation": 8,
//     "eps_sing": 1e-6,                             // optional
//     "collar": 0.01,                               // optional, default 2 diam of the finest cubes
//     "output": "out",                              // optional
//     "analysis": {
//       "seed": 1,
//       "checks": ["whitney", "complex", "skeleton", "trace", "sobolev", "blowup", "contact", "domination"],
//       "p_list": [1.0, 1.5, 1.9, 2.0],
//       "samples": 10000,
//       "trace_samples": 10000,
//       "contact_lines": 100,
//       "contact_tolerance": 1e-3,
//       "domination_functions": 10,
//       "domination_points": 10000
//     }
//   }

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "heislift/extend.hpp"

namespace heislift {

enum ExitCode : int {
  kExitOk = 0,
  kExitChecksFailed = 1,
  kExitConfig = 2,
  kExitUnsupportedFill = 3,
  kExitConstruction = 4,
  kExitOther = 5,
};

/// Bad or inconsistent configuration and input files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AnalysisPlan {
  std::uint64_t seed = 1;
  std::vector<std::string> checks;
  std::vector<double> p_list{1.0, 1.5, 1.9, 2.0};
  std::size_t samples = 10000;
  std::size_t trace_samples = 10000;
  std::size_t contact_lines = 100;
  double contact_tolerance = 1e-3;
  std::size_t domination_functions = 10;
  std::size_t domination_points = 10000;

  bool enabled(const std::string& check) const;
};

struct RunConfig {
  int m = 2;
  int n = 1;
  Box omega;
  std::string target_kind = "heisenberg";
  int target_dim = 1;
  std::filesystem::path data_path;
  int max_generation = 8;
  double eps_sing = 1e-6;
  double collar = -1.0;
  std::filesystem::path output = "out";
  AnalysisPlan analysis;

  TargetSpace target() const;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"whitney", "complex",  "skeleton", "trace",
                                              "sobolev", "blowup",   "contact",  "domination"};
  return names;
}

/// Parses and validates the config. Relative paths resolve against base_dir.
/// Throws ConfigError, or UnsupportedFill for Heisenberg targets with n >= 2.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Reads boundary data rows (m site coordinates, then target coordinates).
/// '#' comments and blank lines are skipped. Throws ConfigError.
BoundaryData read_boundary_csv(const std::filesystem::path& path, int m, const TargetSpace& target);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

/// Parse-and-validate without building: config, data file, sites strictly
/// inside omega, p list. p >= n+1 is a warning.
CheckReport check_config(const std::filesystem::path& path);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunResult {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

/// Builds everything and writes the artifact bundle into config.output.
RunResult run_pipeline(const RunConfig& config, int jobs);

void to_json(nlohmann::json& j, const CheckReport& r);

}  // namespace heislift
