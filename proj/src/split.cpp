#include "boxcal/split.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace boxcal {

SplitResult split_by_images(const GroundTruthSet& gt, const DetectionSet& det, double fraction,
                            std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw ParameterError("split fraction must be in (0, 1)");
  }
  std::set<ImageId> id_set(gt.registered_images.begin(), gt.registered_images.end());
  for (const auto& obj : gt.items) id_set.insert(obj.image_id);
  for (const auto& d : det.items) id_set.insert(d.image_id);
  if (id_set.size() < 2) {
    throw SplitError("need at least 2 images to split");
  }

  std::vector<ImageId> ids(id_set.begin(), id_set.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  const auto n_calib = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(ids.size())));

  SplitResult result;
  result.assignment.seed = seed;
  result.assignment.fraction = fraction;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i < n_calib) {
      result.assignment.calib_image_ids.insert(ids[i]);
    } else {
      result.assignment.holdout_image_ids.insert(ids[i]);
    }
  }

  const auto& calib_ids = result.assignment.calib_image_ids;
  auto in_calib = [&calib_ids](ImageId id) { return calib_ids.count(id) != 0; };

  for (ImageId id : gt.registered_images) {
    (in_calib(id) ? result.calib_gt : result.holdout_gt).registered_images.push_back(id);
  }
  result.calib_gt.registered_categories = gt.registered_categories;
  result.holdout_gt.registered_categories = gt.registered_categories;
  for (const auto& obj : gt.items) {
    (in_calib(obj.image_id) ? result.calib_gt : result.holdout_gt).items.push_back(obj);
  }
  for (const auto& d : det.items) {
    (in_calib(d.image_id) ? result.calib_det : result.holdout_det).items.push_back(d);
  }
  return result;
}

}  // namespace boxcal
