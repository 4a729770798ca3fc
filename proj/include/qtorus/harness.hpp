#pragma once

// Experiment engine: the Egorov error ||beta^hbar_t f - beta_t f||_hbar over
// (hbar, t) grids, commutator-to-bracket residual scans and log-log order fits.

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qtorus/config.hpp"
#include "qtorus/cstar_norm.hpp"
#include "qtorus/deformed_product.hpp"
#include "qtorus/fourier_element.hpp"

namespace qtorus {

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int used = 0;  // pairs entering the fit
};

/// OLS of log(err) against log|hbar|. Non-positive errors are skipped;
/// fewer than three usable pairs throws InsufficientData.
OrderFit fit_order(std::span<const std::pair<double, double>> samples);

/// Classical reference beta_t f, shared by every hbar at the same t.
struct ClassicalSide {
  double t = 0.0;
  FourierElement element = FourierElement(2);
  double discarded_l1 = 0.0;
  int radius = 0;
  int steps = 0;
  std::string error;  // empty when the pullback succeeded
};

ClassicalSide classical_side(const FourierElement& f, const FourierElement& H, double t,
                             const SymplecticStructure& J, const ExperimentConfig& cfg);

struct ErrorRecord {
  double hbar = 0.0;
  double t = 0.0;
  NormEstimate err;
  double discarded_mass = 0.0;  // quantum plus classical truncation mass
  double wall_time = 0.0;       // seconds; excluded from CSV output
  int radius = 0;
  bool valid = true;
  std::string note;
};

ErrorRecord egorov_error(const FourierElement& f, const FourierElement& H, double hbar, double t,
                         const SymplecticStructure& J, const ExperimentConfig& cfg);
ErrorRecord egorov_error(const FourierElement& f, const FourierElement& H, double hbar,
                         const ClassicalSide& classical, const SymplecticStructure& J,
                         const ExperimentConfig& cfg);

enum class ResidualKind {
  antisymmetric,  // (pi/(i hbar)) [H, g] - {H, g}
  one_sided,      // (2 pi/(i hbar)) (H x g - H g) - {H, g}
};

struct CommutatorRow {
  double hbar = 0.0;
  NormEstimate err;
};

struct CommutatorScan {
  ResidualKind kind = ResidualKind::antisymmetric;
  std::vector<CommutatorRow> rows;
  std::optional<OrderFit> fit;
  bool degenerate = false;  // every residual vanished
};

/// Throws InsufficientData for fewer than three grid points.
CommutatorScan commutator_limit_scan(const FourierElement& H, const FourierElement& g,
                                     std::span<const double> hbar_grid, const SymplecticStructure& J,
                                     ResidualKind kind = ResidualKind::antisymmetric,
                                     const NormOptions& norm = {});

enum class ScanStatus { clean = 0, partial = 1 };

struct ScanResult {
  std::vector<ErrorRecord> records;  // sorted by hbar, then t
  nlohmann::json summary;
  ScanStatus status = ScanStatus::clean;
  std::string verdict;  // "pass", "fail" or "insufficient-for-fit"
};

/// Runs egorov_error over the grid. Pipelines for distinct hbar run
/// concurrently when parallel is true; the result does not depend on it.
ScanResult scan(const ExperimentConfig& cfg, bool parallel = true);

void write_records_csv(std::ostream& out, std::span<const ErrorRecord> records);
/// Writes CSV, summary and optional plot files under cfg.output_dir.
void write_scan_outputs(const ExperimentConfig& cfg, const ScanResult& result);

nlohmann::json to_json(const OrderFit& fit);
nlohmann::json to_json(const CommutatorScan& scan);
std::string to_string(ResidualKind kind);

}  // namespace qtorus
