#pragma once

// Experiment configuration. The file format is one `key = value` pair per
// line, where value is a JSON literal (strings may also be written bare);
// `#` starts a comment. Keys are exactly the ExperimentConfig field names.
//
//   H = [[[1,0],1,0],[[-1,0],1,0]]
//   f = [[[0,1],1,0]]
//   J = [[0,1],[-1,0]]
//   hbar_grid = [0.1, 0.05, 0.025, 0.0125]
//   t_grid = [0.25, 0.5, 1.0]

#include <iosfwd>
#include <string>
#include <vector>

#include "qtorus/cstar_norm.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/fourier_element.hpp"

namespace qtorus {

struct Tolerances {
  double series_tol = 1e-12;
  double alias_tol = 1e-6;
  double norm_tol = 1e-8;
};

/// Pass/fail thresholds for a scan verdict.
struct Thresholds {
  double ratio_min = 0.35;
  double ratio_max = 0.65;
  double min_order = 0.8;
  double max_discarded = 1e-6;
};

struct ExperimentConfig {
  FourierElement H = FourierElement(2);
  FourierElement f = FourierElement(2);
  SymplecticStructure J = SymplecticStructure::standard(2);
  std::vector<double> hbar_grid{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> t_grid;
  double ode_step = 1e-3;
  int trunc_radius = 32;
  int norm_window = 32;
  Tolerances tolerances;
  NormMethod norm_method = NormMethod::lanczos;
  Thresholds thresholds;
  std::string output_dir = ".";
  std::string csv_path = "records.csv";
  std::string summary_path = "summary.json";
  std::string plot_prefix;  // empty: no gnuplot files

  /// Throws ConfigError describing the first violated constraint.
  void validate() const;
};

/// Parses the key-value format. Unknown keys and malformed values throw
/// ConfigError. The QTORUS_OUTPUT_DIR environment variable, when set,
/// overrides output_dir.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Resolves a relative output file against output_dir.
std::string output_path(const ExperimentConfig& cfg, const std::string& file);

/// Parses J as a JSON d x d array of rows.
SymplecticStructure parse_symplectic(const std::string& json_text);

}  // namespace qtorus
