#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "boxcal/error.hpp"

namespace boxcal {

using ImageId = std::int64_t;
using CategoryId = std::int64_t;

/// Axis-aligned box, pixel coordinates, top-left origin.
struct BBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }
};

struct Detection {
  ImageId image_id = 0;
  CategoryId category = 0;
  BBox bbox;
  double confidence = 0.0;  // in (0, 1]
};

struct GroundTruthObject {
  std::int64_t id = 0;
  ImageId image_id = 0;
  CategoryId category = 0;
  BBox bbox;
  bool ignore = false;  // crowd / ignore region, excluded from |G|
};

/// Detections in file order. Immutable after construction; shared read-only.
struct DetectionSet {
  std::vector<Detection> items;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  /// Categories in first-appearance order.
  std::vector<CategoryId> categories() const;
  /// Image ids in first-appearance order.
  std::vector<ImageId> image_ids() const;
  /// Detection indices grouped per (image, category).
  std::map<std::pair<ImageId, CategoryId>, std::vector<std::size_t>> image_category_index() const;
};

struct GroundTruthSet {
  std::vector<GroundTruthObject> items;
  std::vector<CategoryId> registered_categories;  // from the file's categories array
  std::vector<ImageId> registered_images;         // from the file's images array

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }

  std::map<std::pair<ImageId, CategoryId>, std::vector<std::size_t>> image_category_index() const;
  /// Non-ignored object count per category (|G|), including registered empty categories.
  std::map<CategoryId, std::size_t> gt_count_per_category() const;
};

}  // namespace boxcal
