#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "boxcal/types.hpp"

namespace boxcal {

/// Loads COCO-style ground truth:
/// {images:[{id,width,height}], annotations:[{id,image_id,category_id,bbox:[x,y,w,h],iscrowd}],
///  categories:[{id,name}]}
GroundTruthSet load_ground_truth(const std::filesystem::path& path);

/// Loads COCO-style results: [{image_id, category_id, bbox:[x,y,w,h], score}].
/// Scores outside (0,1] are rejected, not clamped.
DetectionSet load_detections(const std::filesystem::path& path);

GroundTruthSet ground_truth_from_json(const nlohmann::json& j);
DetectionSet detections_from_json(const nlohmann::json& j);
nlohmann::json detections_to_json(const DetectionSet& det);
nlohmann::json ground_truth_to_json(const GroundTruthSet& gt, double image_width = 100000.0,
                                    double image_height = 100000.0);

/// Write-temp-rename; the target is never observed half-written.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace boxcal
