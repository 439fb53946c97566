#include "boxcal/eval_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace boxcal {

PRCurve pr_curve_from_labels(const std::vector<int>& tp_labels, std::size_t gt_count) {
  PRCurve curve;
  curve.gt_count = gt_count;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < tp_labels.size(); ++i) {
    if (tp_labels[i]) ++tp;
    PRPoint pt;
    pt.rank = i + 1;
    pt.precision = static_cast<double>(tp) / static_cast<double>(i + 1);
    pt.recall = gt_count == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(gt_count);
    curve.points.push_back(pt);
  }
  return curve;
}

namespace {

/// Category detections in confidence order (ties by index), ignore-matched
/// skipped, reduced to binary TP labels.
std::vector<int> category_labels(const LabeledDetections& labeled, CategoryId category) {
  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < labeled.detections.items.size(); ++i) {
    if (labeled.detections.items[i].category != category) continue;
    if (labeled.labels[i].ignored) continue;
    indices.push_back(i);
  }
  std::stable_sort(indices.begin(), indices.end(), [&labeled](std::size_t a, std::size_t b) {
    return labeled.detections.items[a].confidence > labeled.detections.items[b].confidence;
  });
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (std::size_t i : indices) labels.push_back(labeled.labels[i].tp ? 1 : 0);
  return labels;
}

}  // namespace

PRCurve pr_curve(const LabeledDetections& labeled, CategoryId category) {
  std::size_t gt_count = 0;
  if (auto it = labeled.gt_count_per_category.find(category);
      it != labeled.gt_count_per_category.end()) {
    gt_count = it->second;
  }
  return pr_curve_from_labels(category_labels(labeled, category), gt_count);
}

std::optional<double> average_precision(const PRCurve& curve, ApMode mode) {
  if (curve.gt_count == 0) return std::nullopt;
  if (mode == ApMode::raw) {
    double ap = 0.0;
    double prev_recall = 0.0;
    for (const auto& pt : curve.points) {
      ap += pt.precision * (pt.recall - prev_recall);
      prev_recall = pt.recall;
    }
    return ap;
  }
  // 101-point max interpolation: precision envelope max over recall >= r,
  // sampled at r in {0.00, 0.01, ..., 1.00}.
  std::vector<double> env(curve.points.size());
  double running = 0.0;
  for (std::size_t i = curve.points.size(); i-- > 0;) {
    running = std::max(running, curve.points[i].precision);
    env[i] = running;
  }
  double total = 0.0;
  std::size_t pos = 0;
  for (int s = 0; s <= 100; ++s) {
    // Achieved recalls are snapped up to the next sample point before the
    // envelope lookup. This keeps the 101-point mean an upper bound on the
    // raw area for every input, the "more optimistic" direction; plain
    // nearest-sample lookup can undershoot the raw AP by up to one grid step.
    while (pos < curve.points.size() &&
           std::ceil(curve.points[pos].recall * 100.0 - 1e-9) < static_cast<double>(s)) {
      ++pos;
    }
    if (pos < curve.points.size()) total += env[pos];
  }
  return total / 101.0;
}

double ap_raw_from_labels(const std::vector<int>& tp_labels, std::size_t gt_count) {
  auto ap = average_precision(pr_curve_from_labels(tp_labels, gt_count), ApMode::raw);
  return ap.value_or(0.0);
}

double ap_interp101_from_labels(const std::vector<int>& tp_labels, std::size_t gt_count) {
  auto ap = average_precision(pr_curve_from_labels(tp_labels, gt_count), ApMode::interp101);
  return ap.value_or(0.0);
}

std::optional<double> ap_est(const LabeledDetections& labeled, CategoryId category) {
  return average_precision(pr_curve(labeled, category), ApMode::raw);
}

MapResult map_metric(const DetectionSet& det, const GroundTruthSet& gt,
                     const std::vector<double>& thresholds, ApMode mode, std::size_t max_dets) {
  if (thresholds.empty()) throw ParameterError("thresholds must be non-empty");
  for (double t : thresholds) {
    if (t <= 0.0 || t > 1.0) throw ParameterError("IoU threshold must be in (0, 1]");
  }

  std::vector<double> all_thresholds = thresholds;
  if (std::find(all_thresholds.begin(), all_thresholds.end(), 0.5) == all_thresholds.end()) {
    all_thresholds.push_back(0.5);
  }

  std::map<CategoryId, std::vector<double>> per_class_aps;  // over requested thresholds
  std::map<CategoryId, double> ap50;
  for (double t : all_thresholds) {
    MatchOptions options;
    options.t_iou = t;
    options.max_dets = max_dets;
    LabeledDetections labeled = match(det, gt, options);
    const bool requested =
        std::find(thresholds.begin(), thresholds.end(), t) != thresholds.end();
    for (const auto& [category, count] : labeled.gt_count_per_category) {
      if (count == 0) continue;  // classes without GT are excluded from averaging
      auto ap = average_precision(pr_curve(labeled, category), mode);
      if (!ap) continue;
      if (requested) per_class_aps[category].push_back(*ap);
      if (t == 0.5) ap50[category] = *ap;
    }
  }
  if (per_class_aps.empty()) throw Error("empty ground truth");

  MapResult result;
  double sum = 0.0;
  for (const auto& [category, aps] : per_class_aps) {
    const double mean = std::accumulate(aps.begin(), aps.end(), 0.0) /
                        static_cast<double>(aps.size());
    result.per_class[category] = mean;
    sum += mean;
  }
  result.map = sum / static_cast<double>(per_class_aps.size());
  double sum50 = 0.0;
  for (const auto& [category, ap] : ap50) sum50 += ap;
  result.map50 = ap50.empty() ? 0.0 : sum50 / static_cast<double>(ap50.size());
  return result;
}

double brier_loss(const std::vector<Sample>& samples) {
  if (samples.empty()) throw ParameterError("brier_loss: empty samples");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double d = s.confidence - static_cast<double>(s.label);
    sum += d * d;
  }
  return sum / static_cast<double>(samples.size());
}

double log_loss(const std::vector<Sample>& samples) {
  if (samples.empty()) throw ParameterError("log_loss: empty samples");
  constexpr double kEps = 1e-7;
  double sum = 0.0;
  for (const auto& s : samples) {
    const double c = std::clamp(s.confidence, kEps, 1.0 - kEps);
    sum -= s.label ? std::log(c) : std::log(1.0 - c);
  }
  return sum / static_cast<double>(samples.size());
}

double abs_diff_loss(const std::vector<Sample>& samples) {
  if (samples.empty()) throw ParameterError("abs_diff_loss: empty samples");
  double sum = 0.0;
  for (const auto& s : samples) {
    sum += std::abs(s.confidence - static_cast<double>(s.label));
  }
  return sum / static_cast<double>(samples.size());
}

double ece(const std::vector<Sample>& samples, int n_bins) {
  if (samples.empty()) throw ParameterError("ece: empty samples");
  if (n_bins < 1) throw ParameterError("ece: n_bins must be >= 1");
  // Equal-width bins over (0, 1]; bin m is ((m-1)/M, m/M].
  auto bin_of = [n_bins](double c) {
    int b = static_cast<int>(std::ceil(c * n_bins)) - 1;
    return std::clamp(b, 0, n_bins - 1);
  };
  std::vector<double> tp(n_bins, 0.0);
  std::vector<double> count(n_bins, 0.0);
  for (const auto& s : samples) {
    const int b = bin_of(s.confidence);
    tp[b] += s.label;
    count[b] += 1.0;
  }
  double sum = 0.0;
  for (const auto& s : samples) {
    const int b = bin_of(s.confidence);
    sum += std::abs(s.confidence - tp[b] / count[b]);
  }
  return sum / static_cast<double>(samples.size());
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, int n_boot,
                                       double alpha, std::uint64_t seed) {
  if (samples.empty()) throw ParameterError("bootstrap_ci: empty samples");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
  std::vector<double> means;
  means.reserve(static_cast<std::size_t>(n_boot));
  for (int b = 0; b < n_boot; ++b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) sum += samples[pick(rng)];
    means.push_back(sum / static_cast<double>(samples.size()));
  }
  if (means.empty()) {
    const double m = std::accumulate(samples.begin(), samples.end(), 0.0) /
                     static_cast<double>(samples.size());
    return {m, m};
  }
  std::sort(means.begin(), means.end());
  return {quantile_sorted(means, alpha / 2.0), quantile_sorted(means, 1.0 - alpha / 2.0)};
}

}  // namespace boxcal
