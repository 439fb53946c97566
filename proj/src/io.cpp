#include "boxcal/io.hpp"

#include <fstream>
#include <sstream>

namespace boxcal {

namespace {

using nlohmann::json;

const json& require_field(const json& j, const char* field, const std::string& context) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw SchemaError(context + ": missing required field '" + field + "'");
  }
  return *it;
}

BBox parse_bbox(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 4) {
    throw SchemaError(context + ": bbox must be an array [x,y,w,h]");
  }
  BBox box;
  box.x = j[0].get<double>();
  box.y = j[1].get<double>();
  box.w = j[2].get<double>();
  box.h = j[3].get<double>();
  return box;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

nlohmann::json read_json(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

GroundTruthSet ground_truth_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("ground truth: top level must be an object");
  GroundTruthSet gt;
  for (const auto& img : require_field(j, "images", "ground truth")) {
    gt.registered_images.push_back(require_field(img, "id", "image").get<ImageId>());
  }
  for (const auto& cat : require_field(j, "categories", "ground truth")) {
    gt.registered_categories.push_back(require_field(cat, "id", "category").get<CategoryId>());
  }
  for (const auto& ann : require_field(j, "annotations", "ground truth")) {
    GroundTruthObject obj;
    obj.id = require_field(ann, "id", "annotation").get<std::int64_t>();
    const std::string context = "annotation " + std::to_string(obj.id);
    obj.image_id = require_field(ann, "image_id", context).get<ImageId>();
    obj.category = require_field(ann, "category_id", context).get<CategoryId>();
    obj.bbox = parse_bbox(require_field(ann, "bbox", context), context);
    obj.ignore = ann.value("iscrowd", 0) != 0;
    if (!obj.bbox.valid()) {
      throw ValidationError(context + ": non-positive box width or height");
    }
    gt.items.push_back(obj);
  }
  return gt;
}

DetectionSet detections_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw FormatError("detections: top level must be an array");
  DetectionSet det;
  std::size_t index = 0;
  for (const auto& rec : j) {
    const std::string context = "detection record " + std::to_string(index);
    Detection d;
    d.image_id = require_field(rec, "image_id", context).get<ImageId>();
    d.category = require_field(rec, "category_id", context).get<CategoryId>();
    d.bbox = parse_bbox(require_field(rec, "bbox", context), context);
    d.confidence = require_field(rec, "score", context).get<double>();
    if (!d.bbox.valid()) {
      throw ValidationError(context + ": non-positive box width or height");
    }
    if (d.confidence <= 0.0 || d.confidence > 1.0) {
      throw ValidationError(context + ": score must be in (0, 1]");
    }
    det.items.push_back(d);
    ++index;
  }
  return det;
}

GroundTruthSet load_ground_truth(const std::filesystem::path& path) {
  return ground_truth_from_json(read_json(path));
}

DetectionSet load_detections(const std::filesystem::path& path) {
  return detections_from_json(read_json(path));
}

nlohmann::json detections_to_json(const DetectionSet& det) {
  json out = json::array();
  for (const auto& d : det.items) {
    out.push_back({{"image_id", d.image_id},
                   {"category_id", d.category},
                   {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
                   {"score", d.confidence}});
  }
  return out;
}

nlohmann::json ground_truth_to_json(const GroundTruthSet& gt, double image_width,
                                    double image_height) {
  json images = json::array();
  for (ImageId id : gt.registered_images) {
    images.push_back({{"id", id}, {"width", image_width}, {"height", image_height}});
  }
  json categories = json::array();
  for (CategoryId id : gt.registered_categories) {
    categories.push_back({{"id", id}, {"name", "category_" + std::to_string(id)}});
  }
  json annotations = json::array();
  for (const auto& obj : gt.items) {
    annotations.push_back({{"id", obj.id},
                           {"image_id", obj.image_id},
                           {"category_id", obj.category},
                           {"bbox", {obj.bbox.x, obj.bbox.y, obj.bbox.w, obj.bbox.h}},
                           {"iscrowd", obj.ignore ? 1 : 0}});
  }
  return {{"images", images}, {"annotations", annotations}, {"categories", categories}};
}

void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace boxcal
