#pragma once

#include <map>
#include <optional>
#include <vector>

#include <json.hpp>

#include "boxcal/eval_metrics.hpp"
#include "boxcal/matching.hpp"
#include "boxcal/types.hpp"

namespace boxcal {

enum class BinScheme { equal_width, quantile };
enum class CurveInterpolation { step, linear };
enum class SupportPlacement { bin_center, mean_confidence };

struct BinningConfig {
  int n_conf_bins = 10;  // C
  BinScheme scheme = BinScheme::quantile;
  CurveInterpolation interpolation = CurveInterpolation::linear;
  bool anchored_bounds = true;
  SupportPlacement support_x = SupportPlacement::mean_confidence;
  int min_samples_per_bin = 2;
};

/// The step/equal-width baseline with every modification off.
BinningConfig baseline_binning(int n_conf_bins);
/// Quantile + linear splines + anchored bounds + weighted supports.
BinningConfig modified_binning(int n_conf_bins);

struct CurveSupport {
  double x = 0.0;
  double y = 0.0;
};

/// Fitted per-subgroup calibration curve. Supports drive linear mode;
/// bin_edges/bin_values drive step mode, so the baseline and all modified
/// variants are representable in one type.
struct CalibrationCurve {
  std::vector<CurveSupport> supports;  // strictly increasing in x
  CurveInterpolation interpolation = CurveInterpolation::linear;
  std::vector<double> bin_edges;   // size = bins + 1, (edge[m-1], edge[m]] is bin m
  std::vector<double> bin_values;  // per-bin TP fraction
};

CalibrationCurve fit_curve(const std::vector<Sample>& samples, const BinningConfig& config);
double apply_curve(const CalibrationCurve& curve, double confidence);

/// Box-size-conditional calibration for one category: B area subgroups with
/// equally many detections, one curve each. B = 1 degenerates to unconditional.
struct ConditionalCalibration {
  CategoryId category = 0;
  int box_bins = 1;                // B
  std::vector<double> box_edges;   // length B-1, area subgroup boundaries
  std::vector<CalibrationCurve> curves;  // length B
};

ConditionalCalibration fit_conditional(const LabeledDetections& labeled, CategoryId category,
                                       int box_bins, const BinningConfig& config);

/// Same fit from pre-collected (sample, area) pairs; K-fold estimators fit on
/// sample subsets through this entry point.
ConditionalCalibration fit_conditional_samples(const std::vector<Sample>& samples,
                                               const std::vector<double>& areas,
                                               CategoryId category, int box_bins,
                                               const BinningConfig& config);

/// Subgroup index for a box area (clamped to the calibration range).
std::size_t subgroup_index(const ConditionalCalibration& cond, double area);
double apply_conditional(const ConditionalCalibration& cond, double confidence, double area);

struct CalibrationMap {
  double t_iou = 0.5;
  BinningConfig config;
  std::map<CategoryId, ConditionalCalibration> categories;
  /// Categories seen in the calibration data but left uncalibrated
  /// (identity fallback at apply time).
  std::vector<CategoryId> fallback_categories;
};

/// Replace each detection's confidence through its category's curve; absent
/// categories pass through unchanged.
DetectionSet calibrate(const CalibrationMap& map, const DetectionSet& det);

nlohmann::json calibration_map_to_json(const CalibrationMap& map);
CalibrationMap calibration_map_from_json(const nlohmann::json& j);

nlohmann::json binning_config_to_json(const BinningConfig& config);
BinningConfig binning_config_from_json(const nlohmann::json& j);

}  // namespace boxcal
