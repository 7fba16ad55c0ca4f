#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "deltalab/disorder.hpp"

namespace deltalab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double root_tol = 1e-11;
  double image_tol = 1e-12;
  double cond_cap = 1e-12;
};

/// One batch experiment, read from a JSON config. Per-experiment required
/// fields are validated up front and missing fields are named.
struct ExperimentConfig {
  std::string experiment;
  std::string output_dir;
  std::uint64_t master_seed = 0;
  int workers = 0;  // 0 = all cores

  int dimension = 1;
  double box_side = 0.0;
  std::string bc = "dirichlet";
  std::optional<double> e0;  // empty with auto_e0 => run the DOS pre-scan
  bool auto_e0 = false;
  double halfwidth = 0.0;  // rescaled window half-width w
  double alpha = 0.0;
  double moment_s = 0.5;
  std::int64_t realizations = 0;
  DistributionSpec distribution;
  Tolerances tolerances;

  std::vector<double> eta_list;
  std::vector<double> energy_list;
  std::vector<long> side_list;
  std::vector<double> window;  // [lo, hi] physical
  double delta = 0.0;
  std::int64_t trials = 0;
  int matrix_size = 8;

  struct ScanConfig {
    double e_min = -2.4;
    double e_max = -0.4;
    double delta = 0.05;
    std::int64_t realizations = 150;
  } scan;

  std::string raw_json;  // echoed into summary.json
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Runs the experiment, writing eigenvalues.csv / rescaled.csv /
/// summary.json / plotdata/*.dat into output_dir as applicable.
/// Re-running with partial outputs recomputes only the missing
/// realizations. Throws on numerical failure.
void run_experiment(const ExperimentConfig& config);

/// DOS pre-scan used by E0 = "auto-dos-scan": proposes the maximizer of
/// the finite-volume DOS estimate over the scan window.
double auto_dos_scan(const ExperimentConfig& config);

}  // namespace deltalab
