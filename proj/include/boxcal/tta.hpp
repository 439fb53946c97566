#pragma once

#include <optional>
#include <string>
#include <vector>

#include "boxcal/calibration.hpp"
#include "boxcal/types.hpp"

namespace boxcal {

enum class TtaMode { merge_then_calibrate_none, calibrate_merged, calibrate_each_then_merge };

struct AugmentedRun {
  std::string tag;  // unique within a batch
  DetectionSet detections;
  std::optional<CalibrationMap> map;  // required for calibrate_each_then_merge
};

/// Merge multi-augmentation detections: calibrate per mode, take the union in
/// a deterministic order (confidence desc, then tag, then index), greedy NMS
/// per (image, category). Boxes are assumed already in original coordinates.
DetectionSet merge_tta(const std::vector<AugmentedRun>& runs, TtaMode mode, double t_nms,
                       const std::optional<CalibrationMap>& merged_map = std::nullopt);

}  // namespace boxcal
