#pragma once

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "boxcal/types.hpp"

namespace boxcal {

/// Intersection over union of two boxes; 0 when disjoint.
double iou(const BBox& a, const BBox& b);

struct MatchLabel {
  std::size_t detection_index = 0;
  bool tp = false;
  /// Detection overlaps only an ignore-region GT; excluded from both the
  /// numerator and the denominator downstream.
  bool ignored = false;
  std::optional<std::int64_t> matched_gt;
};

struct LabeledDetections {
  DetectionSet detections;
  std::vector<MatchLabel> labels;  // aligned by index with detections.items
  std::map<CategoryId, std::size_t> gt_count_per_category;  // |G|, ignores excluded
  double t_iou = 0.5;
};

struct MatchOptions {
  double t_iou = 0.5;
  /// Per-image, per-category cap applied before matching.
  std::size_t max_dets = 100;
};

/// Greedy TP/FP assignment. Per (image, category): detections in confidence
/// order (ties by input index), each matched to the unmatched non-ignored GT
/// with highest IoU >= t_iou (GT ties by lowest id). Detections whose only
/// qualifying overlap is an ignore GT are marked ignored.
LabeledDetections match(const DetectionSet& det, const GroundTruthSet& gt,
                        const MatchOptions& options);

/// Greedy per-(image, category) NMS: keep the highest-confidence box, suppress
/// others with IoU > t_nms against any kept box. Kept detections retain their
/// original confidences; output in input order.
DetectionSet nms(const DetectionSet& det, double t_nms);

}  // namespace boxcal
