#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "boxcal/calibration.hpp"
#include "boxcal/matching.hpp"

namespace boxcal {

enum class Objective { ap, ap_est, brier, log, abs_diff, ece, mse_hat };

std::string objective_name(Objective o);
Objective objective_from_name(const std::string& name);

struct SearchGrid {
  std::vector<int> box_bins{2, 3, 4, 5, 6};
  std::vector<int> conf_bins{4, 5, 6, 8, 10, 12, 14};
  BinningConfig config = modified_binning(10);  // n_conf_bins overridden per cell
};

struct SearchOptions {
  int k_folds = 5;
  std::uint64_t seed = 0;
  /// Eq-as-printed uses signed mean differences for the bias estimate; this
  /// switches to mean absolute differences.
  bool abs_bias = false;
};

/// Smaller value is always better (AP variants stored negated).
struct CellScore {
  int box_bins = 0;
  int conf_bins = 0;
  bool feasible = false;
  double value = 0.0;
  std::optional<double> bias_hat;
  std::optional<double> variance;
};

struct CategoryResult {
  CategoryId category = 0;
  bool fallback = false;  // no feasible cell; identity calibration
  CellScore chosen;
  std::vector<CellScore> cells;
};

struct SearchResult {
  Objective objective = Objective::mse_hat;
  std::vector<CategoryResult> per_category;
  CalibrationMap map;  // fitted at the chosen cells on the full calibration data
};

CellScore score_cell(const LabeledDetections& calib, CategoryId category, int box_bins,
                     int conf_bins, Objective objective, const SearchGrid& grid,
                     const SearchOptions& options);

/// K-fold variance of the calibrated confidence: fit on each fold complement,
/// per-detection population variance across the K values, averaged over the
/// category's calibration detections.
double estimate_variance(const LabeledDetections& calib, CategoryId category, int box_bins,
                         int conf_bins, int k_folds, std::uint64_t seed,
                         const BinningConfig& config);

/// Bias surrogate: max over feasible grid cells of the mean shift from the
/// unconditional reference h_{1,C}, minus this cell's mean shift.
double estimate_bias(const LabeledDetections& calib, CategoryId category, int box_bins,
                     int conf_bins, const SearchGrid& grid, const SearchOptions& options);

double estimate_mse(double bias_hat, double variance);

/// Deterministic fold assignment used by estimate_variance; exposed so tests
/// can reproduce fold contents independently.
std::vector<int> fold_assignment(std::size_t n, int k_folds, std::uint64_t seed);

SearchResult search(const LabeledDetections& calib, const SearchGrid& grid, Objective objective,
                    const SearchOptions& options);

/// Upper-bound selector: per category, the cell maximizing hold-out interp101
/// AP after calibration. Never a deployable method.
SearchResult oracle_select(const LabeledDetections& calib, const LabeledDetections& holdout,
                           const SearchGrid& grid, const SearchOptions& options);

nlohmann::json search_result_to_json(const SearchResult& result);

}  // namespace boxcal
