#include "boxcal/matching.hpp"

#include <algorithm>
#include <set>

namespace boxcal {

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

namespace {

/// Detection indices sorted by confidence descending, input index ascending.
std::vector<std::size_t> confidence_order(const DetectionSet& det,
                                          const std::vector<std::size_t>& indices) {
  std::vector<std::size_t> order = indices;
  std::stable_sort(order.begin(), order.end(), [&det](std::size_t a, std::size_t b) {
    return det.items[a].confidence > det.items[b].confidence;
  });
  return order;
}

}  // namespace

LabeledDetections match(const DetectionSet& det, const GroundTruthSet& gt,
                        const MatchOptions& options) {
  if (options.t_iou <= 0.0 || options.t_iou > 1.0) {
    throw ParameterError("t_iou must be in (0, 1]");
  }

  // Per-image-category cap applied before matching; capped detections are
  // dropped from the output entirely.
  const auto det_index = det.image_category_index();
  std::vector<bool> kept(det.items.size(), false);
  for (const auto& [key, indices] : det_index) {
    auto order = confidence_order(det, indices);
    const std::size_t n = std::min(order.size(), options.max_dets);
    for (std::size_t i = 0; i < n; ++i) kept[order[i]] = true;
  }

  LabeledDetections out;
  out.t_iou = options.t_iou;
  std::vector<std::size_t> new_index(det.items.size());
  for (std::size_t i = 0; i < det.items.size(); ++i) {
    if (kept[i]) {
      new_index[i] = out.detections.items.size();
      out.detections.items.push_back(det.items[i]);
    }
  }
  out.labels.resize(out.detections.items.size());
  for (std::size_t i = 0; i < out.labels.size(); ++i) out.labels[i].detection_index = i;

  out.gt_count_per_category = gt.gt_count_per_category();
  for (CategoryId c : out.detections.categories()) {
    out.gt_count_per_category.emplace(c, 0);
  }

  const auto gt_index = gt.image_category_index();
  for (const auto& [key, indices] : det_index) {
    std::vector<std::size_t> gts;
    if (auto it = gt_index.find(key); it != gt_index.end()) gts = it->second;
    std::vector<bool> gt_taken(gts.size(), false);

    for (std::size_t di : confidence_order(det, indices)) {
      if (!kept[di]) continue;
      const Detection& d = det.items[di];
      MatchLabel& label = out.labels[new_index[di]];

      // Best unmatched non-ignored GT with IoU >= t_iou; ties by lowest GT id.
      double best_iou = 0.0;
      std::size_t best_g = gts.size();
      bool ignore_candidate = false;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        const GroundTruthObject& obj = gt.items[gts[g]];
        const double overlap = iou(d.bbox, obj.bbox);
        // Tolerance keeps geometrically coincident boxes matchable at
        // t_iou = 1.0 despite rounding in the intersection arithmetic.
        if (overlap < options.t_iou - 1e-9) continue;
        if (obj.ignore) {
          ignore_candidate = true;
          continue;
        }
        if (gt_taken[g]) continue;
        if (best_g == gts.size() || overlap > best_iou ||
            (overlap == best_iou && obj.id < gt.items[gts[best_g]].id)) {
          best_iou = overlap;
          best_g = g;
        }
      }
      if (best_g != gts.size()) {
        gt_taken[best_g] = true;
        label.tp = true;
        label.matched_gt = gt.items[gts[best_g]].id;
      } else if (ignore_candidate) {
        label.ignored = true;
      }
    }
  }
  return out;
}

DetectionSet nms(const DetectionSet& det, double t_nms) {
  if (t_nms <= 0.0 || t_nms > 1.0) {
    throw ParameterError("t_nms must be in (0, 1]");
  }
  std::vector<bool> keep(det.items.size(), false);
  for (const auto& [key, indices] : det.image_category_index()) {
    std::vector<std::size_t> kept_here;
    for (std::size_t di : confidence_order(det, indices)) {
      bool suppressed = false;
      for (std::size_t kj : kept_here) {
        if (iou(det.items[di].bbox, det.items[kj].bbox) > t_nms) {
          suppressed = true;
          break;
        }
      }
      if (!suppressed) {
        kept_here.push_back(di);
        keep[di] = true;
      }
    }
  }
  DetectionSet out;
  for (std::size_t i = 0; i < det.items.size(); ++i) {
    if (keep[i]) out.items.push_back(det.items[i]);
  }
  return out;
}

}  // namespace boxcal
