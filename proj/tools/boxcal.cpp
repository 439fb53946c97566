// Command-line front end tying the library into the calibration workflows:
// match detections against ground truth, fit and apply box-size-conditional
// calibration maps, evaluate mAP, merge TTA runs, and generate synthetic
// detector data with known calibration curves.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "boxcal/calibration.hpp"
#include "boxcal/eval_metrics.hpp"
#include "boxcal/expected_ap.hpp"
#include "boxcal/io.hpp"
#include "boxcal/matching.hpp"
#include "boxcal/param_search.hpp"
#include "boxcal/split.hpp"
#include "boxcal/synth.hpp"
#include "boxcal/tta.hpp"

namespace {

using boxcal::CategoryId;
using nlohmann::json;

constexpr int kFormatVersion = 1;

void write_json(const std::filesystem::path& path, const json& j) {
  boxcal::atomic_write_text(path, j.dump(2) + "\n");
}

std::string csv_header_comment(const json& run_config) {
  return "# run_config: " + run_config.dump() + "\n";
}

json labeled_to_json(const boxcal::LabeledDetections& labeled, const json& run_config) {
  json dets = json::array();
  for (std::size_t i = 0; i < labeled.detections.items.size(); ++i) {
    const auto& d = labeled.detections.items[i];
    const auto& l = labeled.labels[i];
    json rec = {{"image_id", d.image_id},
                {"category_id", d.category},
                {"bbox", {d.bbox.x, d.bbox.y, d.bbox.w, d.bbox.h}},
                {"score", d.confidence},
                {"tp", l.tp},
                {"ignored", l.ignored}};
    if (l.matched_gt) rec["matched_gt"] = *l.matched_gt;
    dets.push_back(rec);
  }
  json counts = json::object();
  for (const auto& [category, count] : labeled.gt_count_per_category) {
    counts[std::to_string(category)] = count;
  }
  return {{"format_version", kFormatVersion},
          {"run_config", run_config},
          {"t_iou", labeled.t_iou},
          {"gt_count_per_category", counts},
          {"detections", dets}};
}

boxcal::LabeledDetections labeled_from_json(const json& j) {
  boxcal::LabeledDetections labeled;
  labeled.t_iou = j.at("t_iou").get<double>();
  for (const auto& [key, value] : j.at("gt_count_per_category").items()) {
    labeled.gt_count_per_category[std::stoll(key)] = value.get<std::size_t>();
  }
  for (const auto& rec : j.at("detections")) {
    boxcal::Detection d;
    d.image_id = rec.at("image_id").get<boxcal::ImageId>();
    d.category = rec.at("category_id").get<CategoryId>();
    const auto& b = rec.at("bbox");
    d.bbox = {b.at(0).get<double>(), b.at(1).get<double>(), b.at(2).get<double>(),
              b.at(3).get<double>()};
    d.confidence = rec.at("score").get<double>();
    boxcal::MatchLabel label;
    label.detection_index = labeled.detections.items.size();
    label.tp = rec.at("tp").get<bool>();
    label.ignored = rec.at("ignored").get<bool>();
    if (rec.contains("matched_gt")) label.matched_gt = rec.at("matched_gt").get<std::int64_t>();
    labeled.detections.items.push_back(d);
    labeled.labels.push_back(label);
  }
  return labeled;
}

struct BinningFlags {
  std::string scheme = "quantile";
  std::string interp = "linear";
  bool no_bounds = false;
  std::string support = "mean_confidence";
  int min_samples = 2;

  boxcal::BinningConfig to_config(int n_conf_bins) const {
    boxcal::BinningConfig config;
    config.n_conf_bins = n_conf_bins;
    config.scheme = scheme == "equal_width" ? boxcal::BinScheme::equal_width
                                            : boxcal::BinScheme::quantile;
    config.interpolation = interp == "step" ? boxcal::CurveInterpolation::step
                                            : boxcal::CurveInterpolation::linear;
    config.anchored_bounds = !no_bounds;
    config.support_x = support == "bin_center" ? boxcal::SupportPlacement::bin_center
                                               : boxcal::SupportPlacement::mean_confidence;
    config.min_samples_per_bin = min_samples;
    return config;
  }

  void add_options(CLI::App* cmd) {
    cmd->add_option("--scheme", scheme, "Bin scheme: quantile | equal_width")
        ->check(CLI::IsMember({"quantile", "equal_width"}));
    cmd->add_option("--interp", interp, "Curve mode: linear | step")
        ->check(CLI::IsMember({"linear", "step"}));
    cmd->add_flag("--no-bounds", no_bounds, "Drop the (0,0)/(1,1) anchor supports");
    cmd->add_option("--support", support, "Support placement: mean_confidence | bin_center")
        ->check(CLI::IsMember({"mean_confidence", "bin_center"}));
    cmd->add_option("--min-samples", min_samples, "Minimum samples per confidence bin");
  }

  json to_json() const {
    return {{"scheme", scheme},
            {"interp", interp},
            {"no_bounds", no_bounds},
            {"support", support},
            {"min_samples", min_samples}};
  }
};

void write_pr_csv(const std::filesystem::path& path, const boxcal::PRCurve& curve,
                  const json& run_config) {
  std::ostringstream out;
  out << csv_header_comment(run_config);
  out << "rank,precision,recall\n";
  for (const auto& pt : curve.points) {
    out << pt.rank << "," << pt.precision << "," << pt.recall << "\n";
  }
  boxcal::atomic_write_text(path, out.str());
}

void write_pr_svg(const std::filesystem::path& path, const boxcal::PRCurve& curve) {
  const double w = 400.0, h = 400.0, margin = 40.0;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\">\n";
  out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w - 2 * margin
      << "\" height=\"" << h - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" points=\"";
  for (const auto& pt : curve.points) {
    const double px = margin + pt.recall * (w - 2 * margin);
    const double py = h - margin - pt.precision * (h - 2 * margin);
    out << px << "," << py << " ";
  }
  out << "\"/>\n</svg>\n";
  boxcal::atomic_write_text(path, out.str());
}

int cmd_match(const std::string& gt_path, const std::string& det_path, double t_iou,
              std::size_t max_dets, const std::string& out_path) {
  const json run_config = {{"command", "match"}, {"gt", gt_path},       {"det", det_path},
                           {"t_iou", t_iou},     {"max_dets", max_dets}, {"out", out_path}};
  const auto gt = boxcal::load_ground_truth(gt_path);
  const auto det = boxcal::load_detections(det_path);
  boxcal::MatchOptions options;
  options.t_iou = t_iou;
  options.max_dets = max_dets;
  const auto labeled = boxcal::match(det, gt, options);
  write_json(out_path, labeled_to_json(labeled, run_config));
  return 0;
}

int cmd_calibrate(const std::string& gt_path, const std::string& det_path, double t_iou,
                  std::size_t max_dets, std::vector<int> grid_b, std::vector<int> grid_c,
                  int fixed_b, int fixed_c, const std::string& objective, int k_folds,
                  std::uint64_t seed, bool abs_bias, const BinningFlags& flags,
                  const std::string& out_path, std::string report_path) {
  const json run_config = {{"command", "calibrate"},
                           {"gt", gt_path},
                           {"det", det_path},
                           {"t_iou", t_iou},
                           {"max_dets", max_dets},
                           {"grid_b", grid_b},
                           {"grid_c", grid_c},
                           {"fixed_b", fixed_b},
                           {"fixed_c", fixed_c},
                           {"objective", objective},
                           {"k_folds", k_folds},
                           {"seed", seed},
                           {"abs_bias", abs_bias},
                           {"binning", flags.to_json()},
                           {"out", out_path}};
  const auto gt = boxcal::load_ground_truth(gt_path);
  const auto det = boxcal::load_detections(det_path);
  boxcal::MatchOptions match_options;
  match_options.t_iou = t_iou;
  match_options.max_dets = max_dets;
  const auto labeled = boxcal::match(det, gt, match_options);

  boxcal::SearchGrid grid;
  grid.config = flags.to_config(grid.config.n_conf_bins);
  boxcal::SearchOptions options;
  options.k_folds = k_folds;
  options.seed = seed;
  options.abs_bias = abs_bias;

  boxcal::SearchResult result;
  if (fixed_b > 0 && fixed_c > 0) {
    grid.box_bins = {fixed_b};
    grid.conf_bins = {fixed_c};
  } else {
    if (!grid_b.empty()) grid.box_bins = grid_b;
    if (!grid_c.empty()) grid.conf_bins = grid_c;
  }
  result = boxcal::search(labeled, grid, boxcal::objective_from_name(objective), options);

  json map_json = boxcal::calibration_map_to_json(result.map);
  map_json["run_config"] = run_config;
  write_json(out_path, map_json);

  if (report_path.empty()) report_path = out_path + ".report.json";
  json report = boxcal::search_result_to_json(result);
  report["run_config"] = run_config;
  write_json(report_path, report);
  return 0;
}

int cmd_apply(const std::string& map_path, const std::string& det_path,
              const std::string& out_path) {
  const json run_config = {{"command", "apply"},
                           {"map", map_path},
                           {"det", det_path},
                           {"out", out_path}};
  const auto map = boxcal::calibration_map_from_json(boxcal::read_json(map_path));
  const auto det = boxcal::load_detections(det_path);
  const auto calibrated = boxcal::calibrate(map, det);
  // Canonical detections array; the config echo lives in a sidecar so the
  // output stays loadable as a results file.
  write_json(out_path, boxcal::detections_to_json(calibrated));
  write_json(out_path + ".run.json",
             {{"format_version", kFormatVersion}, {"run_config", run_config}});
  return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& det_path,
             std::vector<double> thresholds, const std::string& mode, std::size_t max_dets,
             const std::string& out_path, const std::string& pr_dir) {
  if (thresholds.empty()) {
    for (int i = 0; i <= 9; ++i) thresholds.push_back(0.5 + 0.05 * i);
  }
  const json run_config = {{"command", "eval"},   {"gt", gt_path},
                           {"det", det_path},     {"thresholds", thresholds},
                           {"mode", mode},        {"max_dets", max_dets},
                           {"out", out_path},     {"pr_dir", pr_dir}};
  const auto gt = boxcal::load_ground_truth(gt_path);
  const auto det = boxcal::load_detections(det_path);
  const auto ap_mode = mode == "raw" ? boxcal::ApMode::raw : boxcal::ApMode::interp101;
  const auto result = boxcal::map_metric(det, gt, thresholds, ap_mode, max_dets);

  json per_class = json::object();
  for (const auto& [category, ap] : result.per_class) {
    per_class[std::to_string(category)] = ap;
  }
  write_json(out_path, {{"format_version", kFormatVersion},
                        {"run_config", run_config},
                        {"mAP", result.map},
                        {"mAP50", result.map50},
                        {"per_class", per_class}});

  if (!pr_dir.empty()) {
    boxcal::MatchOptions options;
    options.t_iou = 0.5;
    options.max_dets = max_dets;
    const auto labeled = boxcal::match(det, gt, options);
    for (const auto& [category, count] : labeled.gt_count_per_category) {
      if (count == 0) continue;
      const auto curve = boxcal::pr_curve(labeled, category);
      const auto base = std::filesystem::path(pr_dir) / ("pr_" + std::to_string(category));
      write_pr_csv(base.string() + ".csv", curve, run_config);
      write_pr_svg(base.string() + ".svg", curve);
    }
  }
  return 0;
}

int cmd_report(const std::string& labels_path, int n_bins, int n_boot, double alpha,
               std::uint64_t seed, const std::string& out_dir) {
  const json run_config = {{"command", "report"}, {"labels", labels_path}, {"n_bins", n_bins},
                           {"n_boot", n_boot},    {"alpha", alpha},        {"seed", seed},
                           {"out_dir", out_dir}};
  const auto labeled = labeled_from_json(boxcal::read_json(labels_path));
  const std::filesystem::path dir(out_dir);

  // Reliability diagram over all non-ignored detections.
  std::vector<std::vector<double>> bin_labels(static_cast<std::size_t>(n_bins));
  std::vector<double> bin_conf(static_cast<std::size_t>(n_bins), 0.0);
  for (std::size_t i = 0; i < labeled.detections.items.size(); ++i) {
    if (labeled.labels[i].ignored) continue;
    const double c = labeled.detections.items[i].confidence;
    int b = static_cast<int>(std::ceil(c * n_bins)) - 1;
    b = std::clamp(b, 0, n_bins - 1);
    bin_labels[b].push_back(labeled.labels[i].tp ? 1.0 : 0.0);
    bin_conf[b] += c;
  }
  std::ostringstream out;
  out << csv_header_comment(run_config);
  out << (n_boot > 0 ? "bin,mean_conf,precision,ci_lo,ci_hi,count\n"
                     : "bin,mean_conf,precision,count\n");
  for (int b = 0; b < n_bins; ++b) {
    const auto& labels = bin_labels[b];
    if (labels.empty()) continue;
    const double mean_conf = bin_conf[b] / static_cast<double>(labels.size());
    double precision = 0.0;
    for (double v : labels) precision += v;
    precision /= static_cast<double>(labels.size());
    out << b << "," << mean_conf << "," << precision;
    if (n_boot > 0) {
      const auto [lo, hi] = boxcal::bootstrap_ci(labels, n_boot, alpha, seed);
      out << "," << lo << "," << hi;
    }
    out << "," << labels.size() << "\n";
  }
  boxcal::atomic_write_text(dir / "reliability.csv", out.str());

  {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\">\n"
        << "<line x1=\"40\" y1=\"360\" x2=\"360\" y2=\"40\" stroke=\"gray\" "
           "stroke-dasharray=\"4\"/>\n";
    for (int b = 0; b < n_bins; ++b) {
      const auto& labels = bin_labels[b];
      if (labels.empty()) continue;
      const double mean_conf = bin_conf[b] / static_cast<double>(labels.size());
      double precision = 0.0;
      for (double v : labels) precision += v;
      precision /= static_cast<double>(labels.size());
      svg << "<circle cx=\"" << 40.0 + mean_conf * 320.0 << "\" cy=\""
          << 360.0 - precision * 320.0 << "\" r=\"3\" fill=\"steelblue\"/>\n";
    }
    svg << "</svg>\n";
    boxcal::atomic_write_text(dir / "reliability.svg", svg.str());
  }

  for (const auto& [category, count] : labeled.gt_count_per_category) {
    if (count == 0) continue;
    const auto curve = boxcal::pr_curve(labeled, category);
    const auto base = dir / ("pr_" + std::to_string(category));
    write_pr_csv(base.string() + ".csv", curve, run_config);
    write_pr_svg(base.string() + ".svg", curve);
  }
  return 0;
}

int cmd_simulate(const std::string& spec_path, std::size_t n_images, CategoryId category,
                 std::uint64_t seed, double pad_fraction, const std::string& out_dir) {
  std::vector<boxcal::SubgroupSpec> specs;
  if (!spec_path.empty()) {
    specs = boxcal::subgroup_specs_from_json(boxcal::read_json(spec_path));
  } else {
    boxcal::SubgroupSpec small;
    small.area_min = 10.0;
    small.area_max = 100.0;
    small.gamma = 2.0;
    small.detection_count = 5000;
    boxcal::SubgroupSpec large;
    large.area_min = 1000.0;
    large.area_max = 10000.0;
    large.gamma = 0.5;
    large.detection_count = 5000;
    specs = {small, large};
  }
  const json run_config = {{"command", "simulate"},
                           {"spec", spec_path},
                           {"specs", boxcal::subgroup_specs_to_json(specs)},
                           {"n_images", n_images},
                           {"category", category},
                           {"seed", seed},
                           {"pad_fraction", pad_fraction},
                           {"out_dir", out_dir}};
  boxcal::GenerateOptions options;
  options.gt_pad_fraction = pad_fraction;
  const auto scene = boxcal::generate(specs, n_images, category, seed, options);
  const std::filesystem::path dir(out_dir);
  write_json(dir / "gt.json", boxcal::ground_truth_to_json(scene.gt));
  write_json(dir / "detections.json", boxcal::detections_to_json(scene.det));
  write_json(dir / "truth.json", {{"format_version", kFormatVersion},
                                  {"run_config", run_config},
                                  {"true_p", scene.true_p},
                                  {"labels", scene.labels}});
  return 0;
}

int cmd_expected_ap(const std::string& input_path, std::size_t trials, std::uint64_t seed,
                    const std::string& out_path) {
  const json run_config = {{"command", "expected-ap"},
                           {"input", input_path},
                           {"trials", trials},
                           {"seed", seed},
                           {"out", out_path}};
  const json in = boxcal::read_json(input_path);
  boxcal::StochasticDetections s;
  s.p = in.at("p").get<std::vector<double>>();
  s.gt_count = in.at("gt_count").get<std::size_t>();

  json out = {{"format_version", kFormatVersion}, {"run_config", run_config}};
  const double closed = boxcal::expected_ap_closed(s);
  out["closed"] = closed;
  std::printf("closed      %.12f\n", closed);
  if (s.p.size() <= 20) {
    const double enumerated = boxcal::expected_ap_enumerate(s);
    out["enumerated"] = enumerated;
    std::printf("enumerated  %.12f\n", enumerated);
  }
  const auto mc = boxcal::expected_ap_monte_carlo(s, trials, seed);
  out["mc_mean"] = mc.mean;
  out["mc_stderr"] = mc.stderr_;
  std::printf("monte-carlo %.12f (stderr %.12f, %zu trials)\n", mc.mean, mc.stderr_, trials);
  if (!out_path.empty()) write_json(out_path, out);
  return 0;
}

int cmd_tta(const std::vector<std::string>& run_specs, const std::string& mode_name,
            const std::string& merged_map_path, double t_nms, const std::string& out_path) {
  const json run_config = {{"command", "tta"},
                           {"runs", run_specs},
                           {"mode", mode_name},
                           {"merged_map", merged_map_path},
                           {"nms", t_nms},
                           {"out", out_path}};
  std::vector<boxcal::AugmentedRun> runs;
  for (const std::string& spec : run_specs) {
    // tag=<detections.json>[:<calib.json>]
    const auto eq = spec.find('=');
    if (eq == std::string::npos) {
      throw boxcal::ConfigError("--run must look like tag=<detections.json>[:<calib.json>]");
    }
    boxcal::AugmentedRun run;
    run.tag = spec.substr(0, eq);
    std::string rest = spec.substr(eq + 1);
    const auto colon = rest.find(':');
    if (colon != std::string::npos) {
      run.map = boxcal::calibration_map_from_json(boxcal::read_json(rest.substr(colon + 1)));
      rest = rest.substr(0, colon);
    }
    run.detections = boxcal::load_detections(rest);
    runs.push_back(std::move(run));
  }
  boxcal::TtaMode mode = boxcal::TtaMode::merge_then_calibrate_none;
  if (mode_name == "calibrate-merged") mode = boxcal::TtaMode::calibrate_merged;
  if (mode_name == "calibrate-each") mode = boxcal::TtaMode::calibrate_each_then_merge;
  std::optional<boxcal::CalibrationMap> merged_map;
  if (!merged_map_path.empty()) {
    merged_map = boxcal::calibration_map_from_json(boxcal::read_json(merged_map_path));
  }
  const auto merged = boxcal::merge_tta(runs, mode, t_nms, merged_map);
  write_json(out_path, boxcal::detections_to_json(merged));
  write_json(out_path + ".run.json",
             {{"format_version", kFormatVersion}, {"run_config", run_config}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Box-size-conditional confidence calibration for object detectors"};
  app.require_subcommand(1);

  std::string gt_path, det_path, out_path, map_path, labels_path, spec_path, input_path;
  std::string pr_dir, out_dir = ".", report_path, mode = "interp101", objective = "mse_hat";
  std::string tta_mode = "none", merged_map_path;
  std::vector<std::string> run_specs;
  std::vector<int> grid_b, grid_c;
  std::vector<double> thresholds;
  double t_iou = 0.5, t_nms = 0.5, alpha = 0.05, pad_fraction = 0.1;
  std::size_t max_dets = 100, n_images = 100, trials = 100000;
  std::uint64_t seed = 0;
  int fixed_b = 0, fixed_c = 0, k_folds = 5, n_bins = 10, n_boot = 1000;
  CategoryId category = 1;
  bool abs_bias = false;
  BinningFlags flags;

  auto* match_cmd = app.add_subcommand("match", "Label detections TP/FP against ground truth");
  match_cmd->add_option("--gt", gt_path, "Ground truth JSON")->required();
  match_cmd->add_option("--det", det_path, "Detections JSON")->required();
  match_cmd->add_option("--t-iou", t_iou, "IoU threshold");
  match_cmd->add_option("--max-dets", max_dets, "Per-image per-category detection cap");
  match_cmd->add_option("--out", out_path, "Output labels JSON")->required();

  auto* cal_cmd = app.add_subcommand("calibrate", "Fit a calibration map (grid search or fixed cell)");
  cal_cmd->add_option("--gt", gt_path)->required();
  cal_cmd->add_option("--det", det_path)->required();
  cal_cmd->add_option("--t-iou", t_iou);
  cal_cmd->add_option("--max-dets", max_dets);
  cal_cmd->add_option("--grid-b", grid_b, "Box-bin candidates (default 2..6)");
  cal_cmd->add_option("--grid-c", grid_c, "Confidence-bin candidates (default 4,5,6,8,10,12,14)");
  cal_cmd->add_option("--fixed-b", fixed_b, "Fixed B (with --fixed-c skips the search)");
  cal_cmd->add_option("--fixed-c", fixed_c, "Fixed C");
  cal_cmd->add_option("--objective", objective)
      ->check(CLI::IsMember({"ap", "ap_est", "brier", "log", "abs_diff", "ece", "mse_hat"}));
  cal_cmd->add_option("--k-folds", k_folds);
  cal_cmd->add_option("--seed", seed);
  cal_cmd->add_flag("--abs-bias", abs_bias, "Absolute-difference bias variant");
  flags.add_options(cal_cmd);
  cal_cmd->add_option("--out", out_path, "Output calibration map JSON")->required();
  cal_cmd->add_option("--report", report_path, "Search report JSON (default <out>.report.json)");

  auto* apply_cmd = app.add_subcommand("apply", "Apply a calibration map to detections");
  apply_cmd->add_option("--map", map_path)->required();
  apply_cmd->add_option("--det", det_path)->required();
  apply_cmd->add_option("--out", out_path)->required();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate detections (mAP / mAP50 / per-class AP)");
  eval_cmd->add_option("--gt", gt_path)->required();
  eval_cmd->add_option("--det", det_path)->required();
  eval_cmd->add_option("--thresholds", thresholds, "IoU thresholds (default 0.50..0.95)");
  eval_cmd->add_option("--mode", mode)->check(CLI::IsMember({"raw", "interp101"}));
  eval_cmd->add_option("--max-dets", max_dets);
  eval_cmd->add_option("--out", out_path)->required();
  eval_cmd->add_option("--pr-dir", pr_dir, "Directory for per-class PR CSV/SVG");

  auto* report_cmd = app.add_subcommand("report", "Reliability diagram + PR curves from labels");
  report_cmd->add_option("--labels", labels_path, "Labels JSON from `match`")->required();
  report_cmd->add_option("--n-bins", n_bins);
  report_cmd->add_option("--n-boot", n_boot, "Bootstrap resamples (0 omits CI columns)");
  report_cmd->add_option("--alpha", alpha);
  report_cmd->add_option("--seed", seed);
  report_cmd->add_option("--out-dir", out_dir)->required();

  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic detector scene");
  sim_cmd->add_option("--spec", spec_path, "Subgroup spec JSON (default: two biased subgroups)");
  sim_cmd->add_option("--n-images", n_images);
  sim_cmd->add_option("--category", category);
  sim_cmd->add_option("--seed", seed);
  sim_cmd->add_option("--pad-fraction", pad_fraction);
  sim_cmd->add_option("--out-dir", out_dir)->required();

  auto* exp_cmd = app.add_subcommand("expected-ap", "Expected AP of a stochastic detector");
  exp_cmd->add_option("--input", input_path, "JSON {p:[...], gt_count}")->required();
  exp_cmd->add_option("--trials", trials);
  exp_cmd->add_option("--seed", seed);
  exp_cmd->add_option("--out", out_path, "Optional output JSON");

  auto* tta_cmd = app.add_subcommand("tta", "Merge test-time-augmentation runs via NMS");
  tta_cmd->add_option("--run", run_specs, "tag=<detections.json>[:<calib.json>], repeatable")
      ->required();
  tta_cmd->add_option("--mode", tta_mode)
      ->check(CLI::IsMember({"none", "calibrate-merged", "calibrate-each"}));
  tta_cmd->add_option("--merged-map", merged_map_path, "Map for calibrate-merged");
  tta_cmd->add_option("--nms", t_nms);
  tta_cmd->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (match_cmd->parsed()) {
      return cmd_match(gt_path, det_path, t_iou, max_dets, out_path);
    }
    if (cal_cmd->parsed()) {
      return cmd_calibrate(gt_path, det_path, t_iou, max_dets, grid_b, grid_c, fixed_b, fixed_c,
                           objective, k_folds, seed, abs_bias, flags, out_path, report_path);
    }
    if (apply_cmd->parsed()) {
      return cmd_apply(map_path, det_path, out_path);
    }
    if (eval_cmd->parsed()) {
      return cmd_eval(gt_path, det_path, thresholds, mode, max_dets, out_path, pr_dir);
    }
    if (report_cmd->parsed()) {
      return cmd_report(labels_path, n_bins, n_boot, alpha, seed, out_dir);
    }
    if (sim_cmd->parsed()) {
      return cmd_simulate(spec_path, n_images, category, seed, pad_fraction, out_dir);
    }
    if (exp_cmd->parsed()) {
      return cmd_expected_ap(input_path, trials, seed, out_path);
    }
    if (tta_cmd->parsed()) {
      return cmd_tta(run_specs, tta_mode, merged_map_path, t_nms, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
