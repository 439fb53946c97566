#include "boxcal/tta.hpp"

#include <algorithm>
#include <set>

#include "boxcal/matching.hpp"

namespace boxcal {

DetectionSet merge_tta(const std::vector<AugmentedRun>& runs, TtaMode mode, double t_nms,
                       const std::optional<CalibrationMap>& merged_map) {
  if (runs.empty()) throw ConfigError("merge_tta: need at least one run");
  {
    std::set<std::string> tags;
    for (const auto& run : runs) {
      if (!tags.insert(run.tag).second) {
        throw ConfigError("merge_tta: duplicate run tag '" + run.tag + "'");
      }
    }
  }
  if (mode == TtaMode::calibrate_merged && !merged_map) {
    throw ConfigError("merge_tta: calibrate_merged requires a merged calibration map");
  }
  if (mode == TtaMode::calibrate_each_then_merge) {
    for (const auto& run : runs) {
      if (!run.map) {
        throw ConfigError("merge_tta: run '" + run.tag + "' has no calibration map");
      }
    }
  }

  // Tag order makes the merge permutation-invariant over runs.
  std::vector<const AugmentedRun*> ordered;
  for (const auto& run : runs) ordered.push_back(&run);
  std::sort(ordered.begin(), ordered.end(),
            [](const AugmentedRun* a, const AugmentedRun* b) { return a->tag < b->tag; });

  DetectionSet merged;
  for (const AugmentedRun* run : ordered) {
    const DetectionSet calibrated = mode == TtaMode::calibrate_each_then_merge
                                        ? calibrate(*run->map, run->detections)
                                        : run->detections;
    merged.items.insert(merged.items.end(), calibrated.items.begin(), calibrated.items.end());
  }
  if (mode == TtaMode::calibrate_merged) {
    merged = calibrate(*merged_map, merged);
  }
  return nms(merged, t_nms);
}

}  // namespace boxcal
