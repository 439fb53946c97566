#include <doctest.h>

#include <algorithm>
#include <set>

#include "boxcal/io.hpp"
#include "boxcal/split.hpp"
#include "boxcal/types.hpp"

using namespace boxcal;
using nlohmann::json;

TEST_CASE("ground truth: empty annotations still registers categories") {
  json j = {{"images", json::array({{{"id", 1}}})},
            {"categories", json::array({{{"id", 3}}, {{"id", 7}}})},
            {"annotations", json::array()}};
  GroundTruthSet gt = ground_truth_from_json(j);
  CHECK(gt.items.empty());
  CHECK(gt.registered_categories == std::vector<CategoryId>{3, 7});
  CHECK(gt.registered_images == std::vector<ImageId>{1});
  auto counts = gt.gt_count_per_category();
  CHECK(counts.at(3) == 0);
  CHECK(counts.at(7) == 0);
}

TEST_CASE("ground truth: minimal single annotation parses") {
  json j = {{"images", json::array({{{"id", 1}}})},
            {"categories", json::array({{{"id", 1}}})},
            {"annotations",
             json::array({{{"id", 5},
                           {"image_id", 1},
                           {"category_id", 1},
                           {"bbox", {0, 0, 2, 2}},
                           {"iscrowd", 0}}})}};
  GroundTruthSet gt = ground_truth_from_json(j);
  REQUIRE(gt.items.size() == 1);
  CHECK(gt.items[0].id == 5);
  CHECK(gt.items[0].ignore == false);
  CHECK(gt.items[0].bbox.area() == doctest::Approx(4.0));
}

TEST_CASE("ground truth: zero-width box rejected") {
  json j = {{"images", json::array()},
            {"categories", json::array()},
            {"annotations",
             json::array({{{"id", 1},
                           {"image_id", 1},
                           {"category_id", 1},
                           {"bbox", {0, 0, 0, 2}}}})}};
  CHECK_THROWS_AS(ground_truth_from_json(j), ValidationError);
}

TEST_CASE("ground truth: missing field names the field") {
  json j = {{"images", json::array()}, {"categories", json::array()}};
  CHECK_THROWS_WITH_AS(ground_truth_from_json(j),
                       doctest::Contains("annotations"), SchemaError);
}

TEST_CASE("detections: empty array") {
  CHECK(detections_from_json(json::array()).empty());
}

TEST_CASE("detections: one record") {
  json j = json::array({{{"image_id", 1},
                         {"category_id", 1},
                         {"bbox", {0, 0, 2, 2}},
                         {"score", 0.9}}});
  DetectionSet det = detections_from_json(j);
  REQUIRE(det.size() == 1);
  CHECK(det.items[0].confidence == doctest::Approx(0.9));
  CHECK(det.items[0].category == 1);
}

TEST_CASE("detections: out-of-range score rejected") {
  json j = json::array({{{"image_id", 1},
                         {"category_id", 1},
                         {"bbox", {0, 0, 2, 2}},
                         {"score", 1.5}}});
  CHECK_THROWS_AS(detections_from_json(j), ValidationError);
  j[0]["score"] = 0.0;
  CHECK_THROWS_AS(detections_from_json(j), ValidationError);
}

TEST_CASE("detections: JSON round trip preserves every record") {
  DetectionSet det;
  det.items.push_back({1, 2, {0.5, 1.5, 3.0, 4.0}, 0.25});
  det.items.push_back({7, 2, {10, 20, 5, 5}, 1.0});
  DetectionSet back = detections_from_json(detections_to_json(det));
  REQUIRE(back.size() == det.size());
  for (std::size_t i = 0; i < det.size(); ++i) {
    CHECK(back.items[i].image_id == det.items[i].image_id);
    CHECK(back.items[i].category == det.items[i].category);
    CHECK(back.items[i].bbox.x == det.items[i].bbox.x);
    CHECK(back.items[i].bbox.h == det.items[i].bbox.h);
    CHECK(back.items[i].confidence == det.items[i].confidence);
  }
}

TEST_CASE("ground truth: JSON round trip") {
  GroundTruthSet gt;
  gt.registered_images = {1, 2};
  gt.registered_categories = {4};
  gt.items.push_back({1, 1, 4, {0, 0, 3, 3}, false});
  gt.items.push_back({2, 2, 4, {5, 5, 2, 2}, true});
  GroundTruthSet back = ground_truth_from_json(ground_truth_to_json(gt));
  CHECK(back.registered_images == gt.registered_images);
  CHECK(back.registered_categories == gt.registered_categories);
  REQUIRE(back.size() == 2);
  CHECK(back.items[1].ignore == true);
}

TEST_CASE("gt_count_per_category excludes ignore regions") {
  GroundTruthSet gt;
  gt.registered_categories = {1, 2};
  gt.items.push_back({1, 1, 1, {0, 0, 1, 1}, false});
  gt.items.push_back({2, 1, 1, {2, 0, 1, 1}, true});
  auto counts = gt.gt_count_per_category();
  CHECK(counts.at(1) == 1);
  CHECK(counts.at(2) == 0);
}

namespace {

GroundTruthSet make_gt_images(int n_images) {
  GroundTruthSet gt;
  gt.registered_categories = {1};
  for (int i = 1; i <= n_images; ++i) {
    gt.registered_images.push_back(i);
    gt.items.push_back({i, i, 1, {0, 0, 2, 2}, false});
  }
  return gt;
}

DetectionSet make_det_images(int n_images) {
  DetectionSet det;
  for (int i = 1; i <= n_images; ++i) {
    det.items.push_back({i, 1, {0, 0, 2, 2}, 0.5});
  }
  return det;
}

}  // namespace

TEST_CASE("split: 10 images at 0.6 gives disjoint 6/4") {
  auto gt = make_gt_images(10);
  auto det = make_det_images(10);
  SplitResult s = split_by_images(gt, det, 0.6, 42);
  CHECK(s.assignment.calib_image_ids.size() == 6);
  CHECK(s.assignment.holdout_image_ids.size() == 4);
  std::set<ImageId> inter;
  std::set_intersection(s.assignment.calib_image_ids.begin(), s.assignment.calib_image_ids.end(),
                        s.assignment.holdout_image_ids.begin(),
                        s.assignment.holdout_image_ids.end(),
                        std::inserter(inter, inter.begin()));
  CHECK(inter.empty());
  CHECK(s.calib_det.size() == 6);
  CHECK(s.holdout_det.size() == 4);
}

TEST_CASE("split: deterministic for a fixed seed") {
  auto gt = make_gt_images(10);
  auto det = make_det_images(10);
  SplitResult a = split_by_images(gt, det, 0.6, 7);
  SplitResult b = split_by_images(gt, det, 0.6, 7);
  CHECK(a.assignment.calib_image_ids == b.assignment.calib_image_ids);
  CHECK(a.assignment.holdout_image_ids == b.assignment.holdout_image_ids);
}

TEST_CASE("split: 5 images at 0.6 gives 3/2 covering all ids") {
  auto gt = make_gt_images(5);
  auto det = make_det_images(5);
  SplitResult s = split_by_images(gt, det, 0.6, 0);
  CHECK(s.assignment.calib_image_ids.size() == 3);
  CHECK(s.assignment.holdout_image_ids.size() == 2);
  std::set<ImageId> all(s.assignment.calib_image_ids);
  all.insert(s.assignment.holdout_image_ids.begin(), s.assignment.holdout_image_ids.end());
  CHECK(all == std::set<ImageId>{1, 2, 3, 4, 5});
}

TEST_CASE("split: fewer than two images is an error") {
  auto gt = make_gt_images(1);
  auto det = make_det_images(1);
  CHECK_THROWS_AS(split_by_images(gt, det, 0.6, 0), SplitError);
}

TEST_CASE("split: detections follow their image") {
  auto gt = make_gt_images(8);
  auto det = make_det_images(8);
  SplitResult s = split_by_images(gt, det, 0.5, 3);
  for (const auto& d : s.calib_det.items) {
    CHECK(s.assignment.calib_image_ids.count(d.image_id) == 1);
  }
  for (const auto& d : s.holdout_det.items) {
    CHECK(s.assignment.holdout_image_ids.count(d.image_id) == 1);
  }
  for (const auto& g : s.calib_gt.items) {
    CHECK(s.assignment.calib_image_ids.count(g.image_id) == 1);
  }
}
