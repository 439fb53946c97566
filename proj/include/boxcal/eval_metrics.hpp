#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "boxcal/matching.hpp"
#include "boxcal/types.hpp"

namespace boxcal {

struct PRPoint {
  std::size_t rank = 0;  // i, 1-based
  double precision = 0.0;
  double recall = 0.0;
};

struct PRCurve {
  std::vector<PRPoint> points;
  std::size_t gt_count = 0;
};

enum class ApMode { raw, interp101 };

/// One (confidence, binary label) pair for the scoring-rule metrics.
struct Sample {
  double confidence = 0.0;
  int label = 0;
};

PRCurve pr_curve(const LabeledDetections& labeled, CategoryId category);
PRCurve pr_curve_from_labels(const std::vector<int>& tp_labels, std::size_t gt_count);

/// nullopt when gt_count == 0 (no-GT sentinel, excluded from class averaging).
std::optional<double> average_precision(const PRCurve& curve, ApMode mode);

double ap_raw_from_labels(const std::vector<int>& tp_labels, std::size_t gt_count);
double ap_interp101_from_labels(const std::vector<int>& tp_labels, std::size_t gt_count);

/// Raw AP for one category; the AP_est optimization metric.
std::optional<double> ap_est(const LabeledDetections& labeled, CategoryId category);

struct MapResult {
  double map = 0.0;
  double map50 = 0.0;
  std::map<CategoryId, double> per_class;  // AP averaged over thresholds, classes with GT only
};

MapResult map_metric(const DetectionSet& det, const GroundTruthSet& gt,
                     const std::vector<double>& thresholds, ApMode mode,
                     std::size_t max_dets = 100);

double brier_loss(const std::vector<Sample>& samples);
double log_loss(const std::vector<Sample>& samples);
double abs_diff_loss(const std::vector<Sample>& samples);
double ece(const std::vector<Sample>& samples, int n_bins = 10);

/// Percentile bootstrap CI of the mean.
std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, int n_boot = 1000,
                                       double alpha = 0.05, std::uint64_t seed = 0);

}  // namespace boxcal
