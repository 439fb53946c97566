#pragma once

#include <cstdint>
#include <set>

#include "boxcal/types.hpp"

namespace boxcal {

struct SplitAssignment {
  std::set<ImageId> calib_image_ids;
  std::set<ImageId> holdout_image_ids;
  std::uint64_t seed = 0;
  double fraction = 0.0;
};

struct SplitResult {
  GroundTruthSet calib_gt;
  DetectionSet calib_det;
  GroundTruthSet holdout_gt;
  DetectionSet holdout_det;
  SplitAssignment assignment;
};

/// Image-level split: ids shuffled by a seeded RNG, first ceil(fraction*n)
/// images go to the calibration split, detections and GT follow their image.
SplitResult split_by_images(const GroundTruthSet& gt, const DetectionSet& det, double fraction,
                            std::uint64_t seed);

}  // namespace boxcal
