#include "boxcal/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace boxcal {

BinningConfig baseline_binning(int n_conf_bins) {
  BinningConfig config;
  config.n_conf_bins = n_conf_bins;
  config.scheme = BinScheme::equal_width;
  config.interpolation = CurveInterpolation::step;
  config.anchored_bounds = false;
  config.support_x = SupportPlacement::bin_center;
  return config;
}

BinningConfig modified_binning(int n_conf_bins) {
  BinningConfig config;
  config.n_conf_bins = n_conf_bins;
  config.scheme = BinScheme::quantile;
  config.interpolation = CurveInterpolation::linear;
  config.anchored_bounds = true;
  config.support_x = SupportPlacement::mean_confidence;
  return config;
}

namespace {

void validate_config(const BinningConfig& config) {
  if (config.n_conf_bins < 1) throw ParameterError("n_conf_bins must be >= 1");
  if (config.min_samples_per_bin < 1) throw ParameterError("min_samples_per_bin must be >= 1");
}

/// Bin boundaries over (0, 1]. Quantile edges sit midway between neighboring
/// sorted confidences; duplicate edges collapse (effective bin count shrinks).
std::vector<double> bin_edges_for(const std::vector<Sample>& samples,
                                  const BinningConfig& config) {
  const int c = config.n_conf_bins;
  std::vector<double> edges;
  if (config.scheme == BinScheme::equal_width) {
    for (int m = 0; m <= c; ++m) edges.push_back(static_cast<double>(m) / c);
    return edges;
  }
  std::vector<double> conf;
  conf.reserve(samples.size());
  for (const auto& s : samples) conf.push_back(s.confidence);
  std::sort(conf.begin(), conf.end());
  edges.push_back(0.0);
  const std::size_t n = conf.size();
  for (int k = 1; k < c; ++k) {
    const std::size_t cut = k * n / c;
    const double edge = 0.5 * (conf[cut - 1] + conf[cut]);
    if (edge > edges.back()) edges.push_back(edge);
  }
  if (edges.back() < 1.0) edges.push_back(1.0);
  return edges;
}

std::size_t bin_of(const std::vector<double>& edges, double confidence) {
  // Bin m covers (edges[m], edges[m+1]].
  auto it = std::lower_bound(edges.begin() + 1, edges.end(), confidence);
  if (it == edges.end()) --it;
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

}  // namespace

CalibrationCurve fit_curve(const std::vector<Sample>& samples, const BinningConfig& config) {
  validate_config(config);
  const auto n = samples.size();
  const auto needed = static_cast<std::size_t>(config.n_conf_bins) *
                      static_cast<std::size_t>(config.min_samples_per_bin);
  if (n < needed) {
    throw InvalidCellError("insufficient samples: " + std::to_string(n) + " < " +
                           std::to_string(needed));
  }

  CalibrationCurve curve;
  curve.interpolation = config.interpolation;
  curve.bin_edges = bin_edges_for(samples, config);
  const std::size_t bins = curve.bin_edges.size() - 1;

  std::vector<std::size_t> count(bins, 0);
  std::vector<std::size_t> tp(bins, 0);
  std::vector<double> conf_sum(bins, 0.0);
  for (const auto& s : samples) {
    const std::size_t m = bin_of(curve.bin_edges, s.confidence);
    ++count[m];
    tp[m] += s.label ? 1 : 0;
    conf_sum[m] += s.confidence;
  }

  std::vector<CurveSupport> supports;
  for (std::size_t m = 0; m < bins; ++m) {
    if (count[m] == 0) {
      throw InvalidCellError("empty bin " + std::to_string(m) + " (" +
                             std::to_string(curve.bin_edges[m]) + ", " +
                             std::to_string(curve.bin_edges[m + 1]) + "]");
    }
    if (count[m] < static_cast<std::size_t>(config.min_samples_per_bin)) {
      throw InvalidCellError("bin " + std::to_string(m) + " has only " +
                             std::to_string(count[m]) + " samples");
    }
    CurveSupport s;
    s.x = config.support_x == SupportPlacement::bin_center
              ? 0.5 * (curve.bin_edges[m] + curve.bin_edges[m + 1])
              : conf_sum[m] / static_cast<double>(count[m]);
    s.y = static_cast<double>(tp[m]) / static_cast<double>(count[m]);
    supports.push_back(s);
    curve.bin_values.push_back(s.y);
  }

  // Supports with identical x merge by averaging y.
  std::sort(supports.begin(), supports.end(),
            [](const CurveSupport& a, const CurveSupport& b) { return a.x < b.x; });
  for (const auto& s : supports) {
    if (!curve.supports.empty() && curve.supports.back().x == s.x) {
      curve.supports.back().y = 0.5 * (curve.supports.back().y + s.y);
    } else {
      curve.supports.push_back(s);
    }
  }
  if (config.anchored_bounds) {
    if (curve.supports.front().x > 0.0) {
      curve.supports.insert(curve.supports.begin(), CurveSupport{0.0, 0.0});
    }
    if (curve.supports.back().x < 1.0) {
      curve.supports.push_back(CurveSupport{1.0, 1.0});
    }
  }
  return curve;
}

double apply_curve(const CalibrationCurve& curve, double confidence) {
  if (curve.interpolation == CurveInterpolation::step) {
    return curve.bin_values[bin_of(curve.bin_edges, confidence)];
  }
  const auto& sup = curve.supports;
  if (confidence <= sup.front().x) return sup.front().y;
  if (confidence >= sup.back().x) return sup.back().y;
  auto it = std::upper_bound(
      sup.begin(), sup.end(), confidence,
      [](double c, const CurveSupport& s) { return c < s.x; });
  const CurveSupport& hi = *it;
  const CurveSupport& lo = *(it - 1);
  const double t = (confidence - lo.x) / (hi.x - lo.x);
  return lo.y + t * (hi.y - lo.y);
}

namespace {

struct CategorySamples {
  std::vector<Sample> samples;
  std::vector<double> areas;  // aligned
};

CategorySamples collect_category(const LabeledDetections& labeled, CategoryId category) {
  CategorySamples out;
  for (std::size_t i = 0; i < labeled.detections.items.size(); ++i) {
    const Detection& d = labeled.detections.items[i];
    if (d.category != category || labeled.labels[i].ignored) continue;
    out.samples.push_back({d.confidence, labeled.labels[i].tp ? 1 : 0});
    out.areas.push_back(d.bbox.area());
  }
  return out;
}

}  // namespace

ConditionalCalibration fit_conditional_samples(const std::vector<Sample>& samples,
                                               const std::vector<double>& areas,
                                               CategoryId category, int box_bins,
                                               const BinningConfig& config) {
  if (box_bins < 1) throw ParameterError("box_bins must be >= 1");
  if (samples.empty()) {
    throw InvalidCellError("invalid cell: no detections for category " +
                           std::to_string(category));
  }

  ConditionalCalibration cond;
  cond.category = category;
  cond.box_bins = box_bins;

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&areas](std::size_t a, std::size_t b) { return areas[a] < areas[b]; });

  const std::size_t n = order.size();
  try {
    for (int b = 0; b < box_bins; ++b) {
      const std::size_t begin = static_cast<std::size_t>(b) * n / box_bins;
      const std::size_t end = static_cast<std::size_t>(b + 1) * n / box_bins;
      if (begin >= end) throw InvalidCellError("invalid cell: empty box subgroup");
      std::vector<Sample> subgroup;
      for (std::size_t k = begin; k < end; ++k) subgroup.push_back(samples[order[k]]);
      cond.curves.push_back(fit_curve(subgroup, config));
      if (b > 0) {
        cond.box_edges.push_back(0.5 * (areas[order[begin - 1]] + areas[order[begin]]));
      }
    }
  } catch (const InvalidCellError& e) {
    throw InvalidCellError(std::string("invalid cell: ") + e.what());
  }
  return cond;
}

ConditionalCalibration fit_conditional(const LabeledDetections& labeled, CategoryId category,
                                       int box_bins, const BinningConfig& config) {
  const CategorySamples data = collect_category(labeled, category);
  return fit_conditional_samples(data.samples, data.areas, category, box_bins, config);
}

std::size_t subgroup_index(const ConditionalCalibration& cond, double area) {
  // Subgroup k covers (edge[k-1], edge[k]]; out-of-range areas clamp.
  auto it = std::lower_bound(cond.box_edges.begin(), cond.box_edges.end(), area);
  return static_cast<std::size_t>(it - cond.box_edges.begin());
}

double apply_conditional(const ConditionalCalibration& cond, double confidence, double area) {
  return apply_curve(cond.curves[subgroup_index(cond, area)], confidence);
}

DetectionSet calibrate(const CalibrationMap& map, const DetectionSet& det) {
  DetectionSet out = det;
  for (auto& d : out.items) {
    auto it = map.categories.find(d.category);
    if (it == map.categories.end()) continue;  // identity fallback
    const double y = apply_conditional(it->second, d.confidence, d.bbox.area());
    // Curves can output exactly 0; keep the (0, 1] confidence invariant.
    d.confidence = std::clamp(y, 1e-9, 1.0);
  }
  return out;
}

namespace {

using nlohmann::json;

std::string scheme_name(BinScheme s) {
  return s == BinScheme::equal_width ? "equal_width" : "quantile";
}
std::string interp_name(CurveInterpolation i) {
  return i == CurveInterpolation::step ? "step" : "linear";
}
std::string support_name(SupportPlacement s) {
  return s == SupportPlacement::bin_center ? "bin_center" : "mean_confidence";
}

json curve_to_json(const CalibrationCurve& curve) {
  json supports = json::array();
  for (const auto& s : curve.supports) supports.push_back({s.x, s.y});
  return {{"supports", supports},
          {"mode", interp_name(curve.interpolation)},
          {"bin_edges", curve.bin_edges},
          {"bin_values", curve.bin_values}};
}

CalibrationCurve curve_from_json(const json& j) {
  CalibrationCurve curve;
  for (const auto& s : j.at("supports")) {
    curve.supports.push_back({s.at(0).get<double>(), s.at(1).get<double>()});
  }
  curve.interpolation = j.at("mode").get<std::string>() == "step" ? CurveInterpolation::step
                                                                  : CurveInterpolation::linear;
  curve.bin_edges = j.at("bin_edges").get<std::vector<double>>();
  curve.bin_values = j.at("bin_values").get<std::vector<double>>();
  return curve;
}

}  // namespace

nlohmann::json binning_config_to_json(const BinningConfig& config) {
  return {{"n_conf_bins", config.n_conf_bins},
          {"scheme", scheme_name(config.scheme)},
          {"interpolation", interp_name(config.interpolation)},
          {"anchored_bounds", config.anchored_bounds},
          {"support_x", support_name(config.support_x)},
          {"min_samples_per_bin", config.min_samples_per_bin}};
}

BinningConfig binning_config_from_json(const nlohmann::json& j) {
  BinningConfig config;
  config.n_conf_bins = j.at("n_conf_bins").get<int>();
  config.scheme = j.at("scheme").get<std::string>() == "equal_width" ? BinScheme::equal_width
                                                                     : BinScheme::quantile;
  config.interpolation = j.at("interpolation").get<std::string>() == "step"
                             ? CurveInterpolation::step
                             : CurveInterpolation::linear;
  config.anchored_bounds = j.at("anchored_bounds").get<bool>();
  config.support_x = j.at("support_x").get<std::string>() == "bin_center"
                         ? SupportPlacement::bin_center
                         : SupportPlacement::mean_confidence;
  config.min_samples_per_bin = j.at("min_samples_per_bin").get<int>();
  return config;
}

nlohmann::json calibration_map_to_json(const CalibrationMap& map) {
  json categories = json::object();
  for (const auto& [id, cond] : map.categories) {
    json curves = json::array();
    for (const auto& curve : cond.curves) curves.push_back(curve_to_json(curve));
    categories[std::to_string(id)] = {
        {"B", cond.box_bins}, {"box_edges", cond.box_edges}, {"curves", curves}};
  }
  return {{"format_version", 1},
          {"t_iou", map.t_iou},
          {"config", binning_config_to_json(map.config)},
          {"categories", categories},
          {"fallback", map.fallback_categories}};
}

CalibrationMap calibration_map_from_json(const nlohmann::json& j) {
  CalibrationMap map;
  map.t_iou = j.at("t_iou").get<double>();
  map.config = binning_config_from_json(j.at("config"));
  for (const auto& [key, value] : j.at("categories").items()) {
    ConditionalCalibration cond;
    cond.category = std::stoll(key);
    cond.box_bins = value.at("B").get<int>();
    cond.box_edges = value.at("box_edges").get<std::vector<double>>();
    for (const auto& curve : value.at("curves")) {
      cond.curves.push_back(curve_from_json(curve));
    }
    map.categories[cond.category] = cond;
  }
  if (j.contains("fallback")) {
    map.fallback_categories = j.at("fallback").get<std::vector<CategoryId>>();
  }
  return map;
}

}  // namespace boxcal
