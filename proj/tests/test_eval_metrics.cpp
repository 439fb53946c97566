#include <doctest.h>

#include <cmath>
#include <random>

#include "boxcal/eval_metrics.hpp"
#include "boxcal/io.hpp"
#include "boxcal/matching.hpp"

using namespace boxcal;

TEST_CASE("pr curve: single TP") {
  PRCurve c = pr_curve_from_labels({1}, 1);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].rank == 1);
  CHECK(c.points[0].precision == doctest::Approx(1.0));
  CHECK(c.points[0].recall == doctest::Approx(1.0));
}

TEST_CASE("pr curve: TP then FP") {
  PRCurve c = pr_curve_from_labels({1, 0}, 2);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].precision == doctest::Approx(1.0));
  CHECK(c.points[0].recall == doctest::Approx(0.5));
  CHECK(c.points[1].precision == doctest::Approx(0.5));
  CHECK(c.points[1].recall == doctest::Approx(0.5));
}

TEST_CASE("pr curve: FP then TP") {
  PRCurve c = pr_curve_from_labels({0, 1}, 2);
  REQUIRE(c.points.size() == 2);
  CHECK(c.points[0].precision == doctest::Approx(0.0));
  CHECK(c.points[0].recall == doctest::Approx(0.0));
  CHECK(c.points[1].precision == doctest::Approx(0.5));
  CHECK(c.points[1].recall == doctest::Approx(0.5));
}

TEST_CASE("raw AP on the three label vectors") {
  CHECK(ap_raw_from_labels({1}, 1) == doctest::Approx(1.0));
  CHECK(ap_raw_from_labels({1, 0}, 2) == doctest::Approx(0.5));
  CHECK(ap_raw_from_labels({0, 1}, 2) == doctest::Approx(0.25));
}

TEST_CASE("interp101 AP on the same vectors") {
  CHECK(ap_interp101_from_labels({1}, 1) == doctest::Approx(1.0));
  CHECK(ap_interp101_from_labels({1, 0}, 2) == doctest::Approx(51.0 / 101.0));
  CHECK(ap_interp101_from_labels({0, 1}, 2) == doctest::Approx(25.5 / 101.0));
}

TEST_CASE("AP is nullopt when there is no ground truth") {
  PRCurve c = pr_curve_from_labels({0, 0}, 0);
  CHECK_FALSE(average_precision(c, ApMode::raw).has_value());
}

TEST_CASE("interp101 never below raw on random label vectors") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 300; ++t) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    std::vector<int> labels(n);
    std::size_t tps = 0;
    for (auto& l : labels) {
      l = std::bernoulli_distribution(0.4)(rng) ? 1 : 0;
      tps += std::size_t(l);
    }
    std::size_t g = tps + std::uniform_int_distribution<std::size_t>(0, 5)(rng);
    if (g == 0) g = 1;
    CHECK(ap_interp101_from_labels(labels, g) >= ap_raw_from_labels(labels, g) - 1e-12);
  }
}

TEST_CASE("map: thresholds {0.5} collapses mAP to mAP50") {
  GroundTruthSet gt = load_ground_truth(std::string(BOXCAL_FIXTURE_DIR) + "/eval_gt.json");
  DetectionSet det = load_detections(std::string(BOXCAL_FIXTURE_DIR) + "/eval_det.json");
  MapResult r = map_metric(det, gt, {0.5}, ApMode::raw);
  CHECK(r.map == doctest::Approx(r.map50));
}

TEST_CASE("map: perfect detections score 1.0") {
  GroundTruthSet gt;
  gt.registered_categories = {1};
  gt.registered_images = {1};
  DetectionSet det;
  for (int i = 0; i < 3; ++i) {
    gt.items.push_back({i + 1, 1, 1, {double(5 * i), 0, 2, 2}, false});
    det.items.push_back({1, 1, {double(5 * i), 0, 2, 2}, 1.0});
  }
  MapResult r = map_metric(det, gt, {0.5}, ApMode::raw);
  CHECK(r.map == doctest::Approx(1.0));
}

TEST_CASE("map: empty ground truth is an error") {
  CHECK_THROWS_AS(map_metric(DetectionSet{}, GroundTruthSet{}, {0.5}, ApMode::raw), Error);
}

TEST_CASE("map: hand-evaluated fixture per-class parity") {
  GroundTruthSet gt = load_ground_truth(std::string(BOXCAL_FIXTURE_DIR) + "/eval_gt.json");
  DetectionSet det = load_detections(std::string(BOXCAL_FIXTURE_DIR) + "/eval_det.json");
  nlohmann::json expected = read_json(std::string(BOXCAL_FIXTURE_DIR) + "/eval_expected.json");

  MapResult raw = map_metric(det, gt, {0.5}, ApMode::raw);
  for (const auto& [key, value] : expected.at("per_class_ap_raw").items()) {
    CHECK(raw.per_class.at(std::stoll(key)) == doctest::Approx(value.get<double>()).epsilon(1e-12));
  }
  CHECK(raw.map50 == doctest::Approx(expected.at("map50_raw").get<double>()).epsilon(1e-12));

  MapResult interp = map_metric(det, gt, {0.5}, ApMode::interp101);
  for (const auto& [key, value] : expected.at("per_class_ap_interp101").items()) {
    CHECK(interp.per_class.at(std::stoll(key)) ==
          doctest::Approx(value.get<double>()).epsilon(1e-4));
  }
}

TEST_CASE("brier loss examples") {
  CHECK(brier_loss({{1.0, 1}}) == doctest::Approx(0.0));
  CHECK(brier_loss({{0.8, 1}, {0.4, 0}}) == doctest::Approx(0.1));
  CHECK(brier_loss({{0.5, 0}, {0.5, 1}}) == doctest::Approx(0.25));
}

TEST_CASE("log loss examples") {
  CHECK(log_loss({{1.0, 1}}) <= 1e-6);
  CHECK(log_loss({{0.5, 1}}) == doctest::Approx(std::log(2.0)));
  CHECK(log_loss({{0.5, 0}, {0.5, 1}}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("absolute-difference loss examples") {
  CHECK(abs_diff_loss({{1.0, 1}}) == doctest::Approx(0.0));
  CHECK(abs_diff_loss({{0.8, 1}, {0.4, 0}}) == doctest::Approx(0.3));
  CHECK(abs_diff_loss({{0.5, 0}, {0.5, 1}}) == doctest::Approx(0.5));
}

TEST_CASE("ece examples") {
  CHECK(ece({{0.7, 1}, {0.7, 0}}, 10) == doctest::Approx(0.2));
  // Confidence equals its bin's precision everywhere.
  CHECK(ece({{0.5, 0}, {0.5, 1}, {1.0, 1}}, 10) == doctest::Approx(0.0));
  CHECK(ece({{0.95, 1}}, 10) == doctest::Approx(0.05));
}

TEST_CASE("bootstrap: constant samples give a point interval") {
  std::vector<double> samples(100, 0.5);
  auto [lo, hi] = bootstrap_ci(samples, 200, 0.05, 1);
  CHECK(lo == doctest::Approx(0.5));
  CHECK(hi == doctest::Approx(0.5));
}

TEST_CASE("bootstrap: alpha=1 collapses to the median quantile twice") {
  std::vector<double> samples = {0.0, 1.0, 0.2, 0.8, 0.4};
  auto [lo, hi] = bootstrap_ci(samples, 500, 1.0, 2);
  CHECK(lo == doctest::Approx(hi));
}

TEST_CASE("bootstrap: Bernoulli(0.5) CI contains 0.5") {
  std::mt19937_64 rng(99);
  std::vector<double> samples(10000);
  for (auto& s : samples) s = std::bernoulli_distribution(0.5)(rng) ? 1.0 : 0.0;
  auto [lo, hi] = bootstrap_ci(samples, 1000, 0.05, 3);
  CHECK(lo <= 0.5);
  CHECK(hi >= 0.5);
  CHECK(hi - lo < 0.05);
}
