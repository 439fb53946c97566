#include "boxcal/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace boxcal {

namespace {

constexpr double kCanvas = 100000.0;

void validate_spec(const SubgroupSpec& spec) {
  if (!(spec.area_min > 0.0) || !(spec.area_min < spec.area_max)) {
    throw ParameterError("subgroup area range must satisfy 0 < min < max");
  }
  if (!(spec.gamma > 0.0)) throw ParameterError("subgroup gamma must be > 0");
  if (spec.confidence.kind == ConfidenceDistribution::Kind::uniform) {
    if (!(spec.confidence.a > 0.0) || !(spec.confidence.a < spec.confidence.b) ||
        spec.confidence.b > 1.0) {
      throw ParameterError("uniform confidence bounds must satisfy 0 < a < b <= 1");
    }
  } else {
    if (!(spec.confidence.a > 0.0) || !(spec.confidence.b > 0.0)) {
      throw ParameterError("beta confidence parameters must be > 0");
    }
  }
}

double draw_confidence(const ConfidenceDistribution& dist, std::mt19937_64& rng) {
  if (dist.kind == ConfidenceDistribution::Kind::uniform) {
    std::uniform_real_distribution<double> u(dist.a, dist.b);
    return u(rng);
  }
  std::gamma_distribution<double> ga(dist.a, 1.0);
  std::gamma_distribution<double> gb(dist.b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return std::clamp(x / (x + y), 1e-9, 1.0);
}

}  // namespace

SyntheticScene generate(const std::vector<SubgroupSpec>& specs, std::size_t n_images,
                        CategoryId category, std::uint64_t seed,
                        const GenerateOptions& options) {
  if (n_images < 1) throw ParameterError("n_images must be >= 1");
  if (specs.empty()) throw ParameterError("need at least one subgroup spec");
  double max_area = 0.0;
  for (const auto& spec : specs) {
    validate_spec(spec);
    max_area = std::max(max_area, spec.area_max);
  }

  std::mt19937_64 rng(seed);
  SyntheticScene scene;

  // Draw all detections first, in spec order, so sampling is independent of
  // placement.
  for (const auto& spec : specs) {
    std::uniform_real_distribution<double> area_dist(spec.area_min, spec.area_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t j = 0; j < spec.detection_count; ++j) {
      Detection d;
      d.category = category;
      d.confidence = draw_confidence(spec.confidence, rng);
      const double area = area_dist(rng);
      const double side = std::sqrt(area);
      d.bbox = {0.0, 0.0, side, side};
      const double p = std::pow(d.confidence, spec.gamma);
      scene.det.items.push_back(d);
      scene.true_p.push_back(p);
      scene.labels.push_back(unit(rng) < p ? 1 : 0);
    }
  }

  std::size_t tp_count = 0;
  for (int label : scene.labels) tp_count += label;
  const auto pad_count = static_cast<std::size_t>(
      std::llround(options.gt_pad_fraction * static_cast<double>(tp_count)));
  std::vector<double> pad_sides;
  for (std::size_t j = 0; j < pad_count; ++j) {
    const auto& spec = specs[j % specs.size()];
    std::uniform_real_distribution<double> area_dist(spec.area_min, spec.area_max);
    pad_sides.push_back(std::sqrt(area_dist(rng)));
  }

  // Disjoint grid placement, round-robin across images.
  const double cell = std::ceil(std::sqrt(max_area)) + 1.0;
  const auto cols = static_cast<std::size_t>(kCanvas / cell);
  const std::size_t capacity = cols * cols;
  const std::size_t total = scene.det.items.size() + pad_count;
  if ((total + n_images - 1) / n_images > capacity) {
    throw GenerationError("cannot place boxes without overlap; increase n_images");
  }
  std::vector<std::size_t> slot_count(n_images, 0);
  auto place = [&](std::size_t entity_index, BBox& box) {
    const std::size_t img = entity_index % n_images;
    const std::size_t slot = slot_count[img]++;
    box.x = static_cast<double>(slot % cols) * cell;
    box.y = static_cast<double>(slot / cols) * cell + options.placement_offset_y;
    return static_cast<ImageId>(img + 1);
  };

  scene.gt.registered_categories.push_back(category);
  for (std::size_t i = 0; i < n_images; ++i) {
    scene.gt.registered_images.push_back(static_cast<ImageId>(i + 1));
  }

  std::int64_t next_gt_id = 1;
  std::size_t entity = 0;
  for (std::size_t i = 0; i < scene.det.items.size(); ++i, ++entity) {
    Detection& d = scene.det.items[i];
    d.image_id = place(entity, d.bbox);
    if (scene.labels[i]) {
      GroundTruthObject obj;
      obj.id = next_gt_id++;
      obj.image_id = d.image_id;
      obj.category = category;
      obj.bbox = d.bbox;  // coincident: IoU exactly 1
      scene.gt.items.push_back(obj);
    }
  }
  for (double side : pad_sides) {
    GroundTruthObject obj;
    obj.id = next_gt_id++;
    obj.category = category;
    obj.bbox = {0.0, 0.0, side, side};
    obj.image_id = place(entity++, obj.bbox);
    scene.gt.items.push_back(obj);
  }
  return scene;
}

LabeledDetections relabel_with_matching(const SyntheticScene& scene, double t_iou) {
  MatchOptions options;
  options.t_iou = t_iou;
  options.max_dets = std::numeric_limits<std::size_t>::max();
  LabeledDetections labeled = match(scene.det, scene.gt, options);
  if (labeled.labels.size() != scene.labels.size()) {
    throw Error("relabel_with_matching: detection count changed");
  }
  for (std::size_t i = 0; i < labeled.labels.size(); ++i) {
    if (static_cast<int>(labeled.labels[i].tp) != scene.labels[i]) {
      throw Error("relabel_with_matching: matched labels disagree with generated labels at " +
                  std::to_string(i));
    }
  }
  return labeled;
}

nlohmann::json subgroup_specs_to_json(const std::vector<SubgroupSpec>& specs) {
  using nlohmann::json;
  json out = json::array();
  for (const auto& spec : specs) {
    out.push_back(
        {{"area_min", spec.area_min},
         {"area_max", spec.area_max},
         {"gamma", spec.gamma},
         {"detection_count", spec.detection_count},
         {"confidence",
          {{"kind",
            spec.confidence.kind == ConfidenceDistribution::Kind::uniform ? "uniform" : "beta"},
           {"a", spec.confidence.a},
           {"b", spec.confidence.b}}}});
  }
  return out;
}

std::vector<SubgroupSpec> subgroup_specs_from_json(const nlohmann::json& j) {
  std::vector<SubgroupSpec> specs;
  for (const auto& e : j) {
    SubgroupSpec spec;
    spec.area_min = e.at("area_min").get<double>();
    spec.area_max = e.at("area_max").get<double>();
    spec.gamma = e.at("gamma").get<double>();
    spec.detection_count = e.at("detection_count").get<std::size_t>();
    const auto& c = e.at("confidence");
    spec.confidence.kind = c.at("kind").get<std::string>() == "beta"
                               ? ConfidenceDistribution::Kind::beta
                               : ConfidenceDistribution::Kind::uniform;
    spec.confidence.a = c.at("a").get<double>();
    spec.confidence.b = c.at("b").get<double>();
    specs.push_back(spec);
  }
  return specs;
}

}  // namespace boxcal
