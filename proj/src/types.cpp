#include "boxcal/types.hpp"

#include <algorithm>
#include <set>

namespace boxcal {

namespace {

template <typename T, typename F>
std::vector<T> first_appearance_order(std::size_t n, F key) {
  std::vector<T> out;
  std::set<T> seen;
  for (std::size_t i = 0; i < n; ++i) {
    T k = key(i);
    if (seen.insert(k).second) out.push_back(k);
  }
  return out;
}

}  // namespace

std::vector<CategoryId> DetectionSet::categories() const {
  return first_appearance_order<CategoryId>(items.size(),
                                            [this](std::size_t i) { return items[i].category; });
}

std::vector<ImageId> DetectionSet::image_ids() const {
  return first_appearance_order<ImageId>(items.size(),
                                         [this](std::size_t i) { return items[i].image_id; });
}

std::map<std::pair<ImageId, CategoryId>, std::vector<std::size_t>>
DetectionSet::image_category_index() const {
  std::map<std::pair<ImageId, CategoryId>, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    index[{items[i].image_id, items[i].category}].push_back(i);
  }
  return index;
}

std::map<std::pair<ImageId, CategoryId>, std::vector<std::size_t>>
GroundTruthSet::image_category_index() const {
  std::map<std::pair<ImageId, CategoryId>, std::vector<std::size_t>> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    index[{items[i].image_id, items[i].category}].push_back(i);
  }
  return index;
}

std::map<CategoryId, std::size_t> GroundTruthSet::gt_count_per_category() const {
  std::map<CategoryId, std::size_t> counts;
  for (CategoryId c : registered_categories) counts[c] = 0;
  for (const auto& obj : items) {
    auto& n = counts[obj.category];
    if (!obj.ignore) ++n;
  }
  return counts;
}

}  // namespace boxcal
