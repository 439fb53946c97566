#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "boxcal/matching.hpp"
#include "boxcal/types.hpp"

namespace boxcal {

struct ConfidenceDistribution {
  enum class Kind { uniform, beta } kind = Kind::uniform;
  double a = 0.05;  // uniform lower bound / beta alpha
  double b = 0.95;  // uniform upper bound / beta beta
};

/// One differently-miscalibrated subgroup: detections with areas in
/// [area_min, area_max] whose true TP probability is confidence^gamma.
struct SubgroupSpec {
  double area_min = 1.0;
  double area_max = 100.0;
  double gamma = 1.0;  // > 0
  std::size_t detection_count = 0;
  ConfidenceDistribution confidence;
};

struct SyntheticScene {
  GroundTruthSet gt;
  DetectionSet det;
  std::vector<double> true_p;  // aligned with det.items
  std::vector<int> labels;     // Bernoulli(true_p) draws, aligned with det.items
};

struct GenerateOptions {
  /// Extra unmatched GT objects, as a fraction of the TP count, so recall < 1
  /// is representable.
  double gt_pad_fraction = 0.1;
  /// Shifts all boxes vertically; lets two generated scenes share images
  /// without overlapping (TTA experiments).
  double placement_offset_y = 0.0;
};

/// Deterministic per seed. TP detections get a coincident GT box (IoU exactly
/// 1); all boxes are mutually disjoint, placed round-robin across images.
SyntheticScene generate(const std::vector<SubgroupSpec>& specs, std::size_t n_images,
                        CategoryId category, std::uint64_t seed,
                        const GenerateOptions& options = {});

/// Runs geometric matching over the scene and checks it reproduces the
/// generator's labels exactly; mismatch throws.
LabeledDetections relabel_with_matching(const SyntheticScene& scene, double t_iou);

nlohmann::json subgroup_specs_to_json(const std::vector<SubgroupSpec>& specs);
std::vector<SubgroupSpec> subgroup_specs_from_json(const nlohmann::json& j);

}  // namespace boxcal
