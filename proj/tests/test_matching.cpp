#include <doctest.h>

#include <algorithm>
#include <random>

#include "boxcal/matching.hpp"

using namespace boxcal;

TEST_CASE("iou: identical boxes") {
  CHECK(iou({0, 0, 2, 2}, {0, 0, 2, 2}) == doctest::Approx(1.0));
}

TEST_CASE("iou: disjoint boxes") {
  CHECK(iou({0, 0, 2, 2}, {4, 4, 1, 1}) == doctest::Approx(0.0));
}

TEST_CASE("iou: unit overlap of two 2x2 boxes is 1/7") {
  CHECK(iou({0, 0, 2, 2}, {1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0));
}

namespace {

GroundTruthSet one_gt() {
  GroundTruthSet gt;
  gt.registered_categories = {1};
  gt.registered_images = {1};
  gt.items.push_back({1, 1, 1, {0, 0, 2, 2}, false});
  return gt;
}

}  // namespace

TEST_CASE("match: second detection loses the only ground truth") {
  DetectionSet det;
  det.items.push_back({1, 1, {0, 0, 2, 2}, 0.9});
  det.items.push_back({1, 1, {0.1, 0.1, 2, 2}, 0.8});
  LabeledDetections lab = match(det, one_gt(), {});
  REQUIRE(lab.labels.size() == 2);
  CHECK(lab.labels[0].tp);
  CHECK(lab.labels[0].matched_gt == 1);
  CHECK_FALSE(lab.labels[1].tp);
  CHECK_FALSE(lab.labels[1].matched_gt.has_value());
  CHECK(lab.gt_count_per_category.at(1) == 1);
}

TEST_CASE("match: no ground truth in the image means all FP") {
  GroundTruthSet gt;
  gt.registered_categories = {1};
  DetectionSet det;
  det.items.push_back({5, 1, {0, 0, 2, 2}, 0.9});
  LabeledDetections lab = match(det, gt, {});
  REQUIRE(lab.labels.size() == 1);
  CHECK_FALSE(lab.labels[0].tp);
}

TEST_CASE("match: empty detections keep the GT counts") {
  LabeledDetections lab = match(DetectionSet{}, one_gt(), {});
  CHECK(lab.labels.empty());
  CHECK(lab.gt_count_per_category.at(1) == 1);
}

TEST_CASE("match: detection over an ignore region is flagged, not FP") {
  GroundTruthSet gt = one_gt();
  gt.items.push_back({2, 1, 1, {10, 10, 4, 4}, true});
  DetectionSet det;
  det.items.push_back({1, 1, {10, 10, 4, 4}, 0.7});
  LabeledDetections lab = match(det, gt, {});
  REQUIRE(lab.labels.size() == 1);
  CHECK(lab.labels[0].ignored);
  CHECK_FALSE(lab.labels[0].tp);
  CHECK(lab.gt_count_per_category.at(1) == 1);
}

TEST_CASE("match: max_dets caps each image-category before matching") {
  DetectionSet det;
  for (int i = 0; i < 5; ++i) {
    det.items.push_back({1, 1, {double(4 * i + 10), 0, 2, 2}, 0.5 + 0.05 * i});
  }
  MatchOptions opt;
  opt.max_dets = 3;
  LabeledDetections lab = match(det, one_gt(), opt);
  CHECK(lab.detections.size() == 3);
  for (const auto& d : lab.detections.items) CHECK(d.confidence >= 0.6);
}

TEST_CASE("match: GT ties broken by lowest id") {
  GroundTruthSet gt;
  gt.registered_categories = {1};
  gt.items.push_back({9, 1, 1, {0, 0, 2, 2}, false});
  gt.items.push_back({4, 1, 1, {0, 0, 2, 2}, false});
  DetectionSet det;
  det.items.push_back({1, 1, {0, 0, 2, 2}, 0.9});
  LabeledDetections lab = match(det, gt, {});
  CHECK(lab.labels[0].matched_gt == 4);
}

TEST_CASE("match: input permutation does not change per-box outcomes") {
  std::mt19937_64 rng(11);
  GroundTruthSet gt;
  gt.registered_categories = {1};
  for (int i = 0; i < 6; ++i) gt.items.push_back({i + 1, 1, 1, {double(5 * i), 0, 4, 4}, false});
  DetectionSet det;
  for (int i = 0; i < 12; ++i) {
    double x = std::uniform_real_distribution<>(0.0, 30.0)(rng);
    double c = std::uniform_real_distribution<>(0.01, 0.99)(rng);
    det.items.push_back({1, 1, {x, 0, 4, 4}, c});
  }
  // Distinct confidences guarantee a unique greedy order.
  std::sort(det.items.begin(), det.items.end(),
            [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
  LabeledDetections ref = match(det, gt, {});
  DetectionSet shuffled = det;
  std::shuffle(shuffled.items.begin(), shuffled.items.end(), rng);
  LabeledDetections got = match(shuffled, gt, {});
  for (std::size_t i = 0; i < got.detections.size(); ++i) {
    double c = got.detections.items[i].confidence;
    auto it = std::find_if(ref.detections.items.begin(), ref.detections.items.end(),
                           [&](const Detection& d) { return d.confidence == c; });
    REQUIRE(it != ref.detections.items.end());
    std::size_t j = std::size_t(it - ref.detections.items.begin());
    CHECK(got.labels[i].tp == ref.labels[j].tp);
    CHECK(got.labels[i].matched_gt == ref.labels[j].matched_gt);
  }
}

TEST_CASE("match: TP count never increases with a stricter threshold") {
  std::mt19937_64 rng(23);
  GroundTruthSet gt;
  gt.registered_categories = {1};
  DetectionSet det;
  for (int i = 0; i < 10; ++i) gt.items.push_back({i + 1, 1, 1, {double(6 * i), 0, 4, 4}, false});
  for (int i = 0; i < 25; ++i) {
    double x = std::uniform_real_distribution<>(0.0, 60.0)(rng);
    double c = std::uniform_real_distribution<>(0.01, 0.99)(rng);
    det.items.push_back({1, 1, {x, 0, 4, 4}, c});
  }
  std::size_t prev = det.size() + 1;
  for (double t : {0.3, 0.5, 0.7, 0.9}) {
    MatchOptions opt;
    opt.t_iou = t;
    LabeledDetections lab = match(det, gt, opt);
    std::size_t tps = 0;
    for (const auto& l : lab.labels) tps += l.tp ? 1 : 0;
    CHECK(tps <= prev);
    prev = tps;
  }
}

TEST_CASE("nms: duplicate box suppressed, higher confidence kept") {
  DetectionSet det;
  det.items.push_back({1, 1, {0, 0, 2, 2}, 0.9});
  det.items.push_back({1, 1, {0, 0, 2, 2}, 0.8});
  DetectionSet out = nms(det, 0.5);
  REQUIRE(out.size() == 1);
  CHECK(out.items[0].confidence == doctest::Approx(0.9));
}

TEST_CASE("nms: disjoint boxes both kept") {
  DetectionSet det;
  det.items.push_back({1, 1, {0, 0, 2, 2}, 0.9});
  det.items.push_back({1, 1, {10, 10, 2, 2}, 0.8});
  CHECK(nms(det, 0.5).size() == 2);
}

TEST_CASE("nms: IoU 1/7 below threshold keeps both") {
  DetectionSet det;
  det.items.push_back({1, 1, {0, 0, 2, 2}, 0.9});
  det.items.push_back({1, 1, {1, 1, 2, 2}, 0.8});
  CHECK(nms(det, 0.5).size() == 2);
}

TEST_CASE("nms: idempotent") {
  std::mt19937_64 rng(5);
  DetectionSet det;
  for (int i = 0; i < 30; ++i) {
    double x = std::uniform_real_distribution<>(0.0, 20.0)(rng);
    double y = std::uniform_real_distribution<>(0.0, 20.0)(rng);
    double c = std::uniform_real_distribution<>(0.01, 0.99)(rng);
    det.items.push_back({i % 3, 1, {x, y, 4, 4}, c});
  }
  DetectionSet once = nms(det, 0.5);
  DetectionSet twice = nms(once, 0.5);
  REQUIRE(twice.size() == once.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(twice.items[i].confidence == once.items[i].confidence);
    CHECK(twice.items[i].bbox.x == once.items[i].bbox.x);
  }
}
