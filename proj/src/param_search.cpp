#include "boxcal/param_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "boxcal/eval_metrics.hpp"

namespace boxcal {

std::string objective_name(Objective o) {
  switch (o) {
    case Objective::ap: return "ap";
    case Objective::ap_est: return "ap_est";
    case Objective::brier: return "brier";
    case Objective::log: return "log";
    case Objective::abs_diff: return "abs_diff";
    case Objective::ece: return "ece";
    case Objective::mse_hat: return "mse_hat";
  }
  return "mse_hat";
}

Objective objective_from_name(const std::string& name) {
  if (name == "ap") return Objective::ap;
  if (name == "ap_est") return Objective::ap_est;
  if (name == "brier") return Objective::brier;
  if (name == "log") return Objective::log;
  if (name == "abs_diff") return Objective::abs_diff;
  if (name == "ece") return Objective::ece;
  if (name == "mse_hat") return Objective::mse_hat;
  throw ParameterError("unknown objective: " + name);
}

namespace {

struct CategoryData {
  std::vector<Sample> samples;  // non-ignored detections of the category
  std::vector<double> areas;
  std::size_t gt_count = 0;
};

CategoryData collect(const LabeledDetections& labeled, CategoryId category) {
  CategoryData data;
  for (std::size_t i = 0; i < labeled.detections.items.size(); ++i) {
    const Detection& d = labeled.detections.items[i];
    if (d.category != category || labeled.labels[i].ignored) continue;
    data.samples.push_back({d.confidence, labeled.labels[i].tp ? 1 : 0});
    data.areas.push_back(d.bbox.area());
  }
  if (auto it = labeled.gt_count_per_category.find(category);
      it != labeled.gt_count_per_category.end()) {
    data.gt_count = it->second;
  }
  return data;
}

BinningConfig cell_config(const SearchGrid& grid, int conf_bins) {
  BinningConfig config = grid.config;
  config.n_conf_bins = conf_bins;
  return config;
}

std::vector<Sample> apply_to_samples(const ConditionalCalibration& cond,
                                     const CategoryData& data) {
  std::vector<Sample> out;
  out.reserve(data.samples.size());
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    out.push_back(
        {apply_conditional(cond, data.samples[i].confidence, data.areas[i]),
         data.samples[i].label});
  }
  return out;
}

/// AP of the samples when re-sorted by (possibly calibrated) confidence,
/// keeping the existing TP labels.
double ap_of_samples(const std::vector<Sample>& samples, std::size_t gt_count, ApMode mode) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&samples](std::size_t a, std::size_t b) {
    return samples[a].confidence > samples[b].confidence;
  });
  std::vector<int> labels;
  labels.reserve(samples.size());
  for (std::size_t i : order) labels.push_back(samples[i].label);
  return mode == ApMode::raw ? ap_raw_from_labels(labels, gt_count)
                             : ap_interp101_from_labels(labels, gt_count);
}

/// Mean shift of calibrated confidences against the unconditional reference
/// h_{1,C}; the building block of the bias surrogate.
double mean_shift(const CategoryData& data, const ConditionalCalibration& conditional,
                  const ConditionalCalibration& reference, bool abs_diff) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const double diff =
        apply_conditional(conditional, data.samples[i].confidence, data.areas[i]) -
        apply_conditional(reference, data.samples[i].confidence, data.areas[i]);
    sum += abs_diff ? std::abs(diff) : diff;
  }
  return sum / static_cast<double>(data.samples.size());
}

struct Cell {
  int box_bins;
  int conf_bins;
};

/// Mean shift per feasible grid cell, computed once per category.
std::map<std::pair<int, int>, double> shift_table(const CategoryData& data, CategoryId category,
                                                  const SearchGrid& grid,
                                                  const SearchOptions& options) {
  std::map<std::pair<int, int>, double> table;
  for (int c : grid.conf_bins) {
    ConditionalCalibration reference;
    try {
      reference = fit_conditional_samples(data.samples, data.areas, category, 1,
                                          cell_config(grid, c));
    } catch (const InvalidCellError&) {
      continue;  // no unconditional reference at this C
    }
    table[{1, c}] = 0.0;  // h_{1,C} shifts zero against itself
    for (int b : grid.box_bins) {
      if (b == 1) continue;
      try {
        const auto conditional = fit_conditional_samples(data.samples, data.areas, category, b,
                                                         cell_config(grid, c));
        table[{b, c}] = mean_shift(data, conditional, reference, options.abs_bias);
      } catch (const InvalidCellError&) {
      }
    }
  }
  return table;
}

double bias_from_table(const std::map<std::pair<int, int>, double>& table,
                       const SearchGrid& grid, int box_bins, int conf_bins) {
  auto it = table.find({box_bins, conf_bins});
  if (it == table.end()) throw InvalidCellError("invalid cell: no bias term");
  // Max over the explored grid cells plus the queried cell; B=1 entries
  // outside the grid are query support, not part of the search space.
  double max_shift = it->second;
  for (const auto& [cell, shift] : table) {
    if (std::find(grid.box_bins.begin(), grid.box_bins.end(), cell.first) ==
        grid.box_bins.end()) {
      continue;
    }
    max_shift = std::max(max_shift, shift);
  }
  return max_shift - it->second;
}

double variance_from_samples(const CategoryData& data, CategoryId category, int box_bins,
                             const BinningConfig& config, int k_folds, std::uint64_t seed) {
  if (k_folds < 2) throw ParameterError("k_folds must be >= 2");
  const std::size_t n = data.samples.size();
  const std::vector<int> folds = fold_assignment(n, k_folds, seed);

  std::vector<ConditionalCalibration> fold_maps;
  for (int k = 0; k < k_folds; ++k) {
    std::vector<Sample> samples;
    std::vector<double> areas;
    for (std::size_t i = 0; i < n; ++i) {
      if (folds[i] == k) continue;  // fit on the fold complement
      samples.push_back(data.samples[i]);
      areas.push_back(data.areas[i]);
    }
    fold_maps.push_back(
        fit_conditional_samples(samples, areas, category, box_bins, config));
  }

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double mean = 0.0;
    std::vector<double> values(fold_maps.size());
    for (std::size_t k = 0; k < fold_maps.size(); ++k) {
      values[k] =
          apply_conditional(fold_maps[k], data.samples[i].confidence, data.areas[i]);
      mean += values[k];
    }
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    total += var / static_cast<double>(values.size());  // population variance
  }
  return total / static_cast<double>(n);
}

CellScore score_cell_impl(const CategoryData& data, CategoryId category, int box_bins,
                          int conf_bins, Objective objective, const SearchGrid& grid,
                          const SearchOptions& options,
                          const std::map<std::pair<int, int>, double>* bias_table) {
  CellScore score;
  score.box_bins = box_bins;
  score.conf_bins = conf_bins;
  try {
    const BinningConfig config = cell_config(grid, conf_bins);
    const auto cond =
        fit_conditional_samples(data.samples, data.areas, category, box_bins, config);
    const auto calibrated = apply_to_samples(cond, data);
    switch (objective) {
      case Objective::ap:
        score.value = -ap_of_samples(calibrated, data.gt_count, ApMode::interp101);
        break;
      case Objective::ap_est:
        score.value = -ap_of_samples(calibrated, data.gt_count, ApMode::raw);
        break;
      case Objective::brier:
        score.value = brier_loss(calibrated);
        break;
      case Objective::log:
        score.value = log_loss(calibrated);
        break;
      case Objective::abs_diff:
        score.value = abs_diff_loss(calibrated);
        break;
      case Objective::ece:
        score.value = ece(calibrated, 10);
        break;
      case Objective::mse_hat: {
        std::map<std::pair<int, int>, double> local_table;
        if (bias_table == nullptr) {
          local_table = shift_table(data, category, grid, options);
          bias_table = &local_table;
        }
        const double bias = bias_from_table(*bias_table, grid, box_bins, conf_bins);
        const double variance = variance_from_samples(data, category, box_bins, config,
                                                      options.k_folds, options.seed);
        score.bias_hat = bias;
        score.variance = variance;
        score.value = estimate_mse(bias, variance);
        break;
      }
    }
    score.feasible = true;
  } catch (const InvalidCellError&) {
    score.feasible = false;
  }
  return score;
}

std::vector<CategoryId> detection_categories(const LabeledDetections& labeled) {
  std::set<CategoryId> set;
  for (const auto& d : labeled.detections.items) set.insert(d.category);
  return {set.begin(), set.end()};
}

bool better(const CellScore& a, const CellScore& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.box_bins != b.box_bins) return a.box_bins < b.box_bins;
  return a.conf_bins < b.conf_bins;
}

}  // namespace

std::vector<int> fold_assignment(std::size_t n, int k_folds, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> folds(n);
  for (std::size_t j = 0; j < n; ++j) {
    folds[order[j]] = static_cast<int>(j % static_cast<std::size_t>(k_folds));
  }
  return folds;
}

CellScore score_cell(const LabeledDetections& calib, CategoryId category, int box_bins,
                     int conf_bins, Objective objective, const SearchGrid& grid,
                     const SearchOptions& options) {
  return score_cell_impl(collect(calib, category), category, box_bins, conf_bins, objective,
                         grid, options, nullptr);
}

double estimate_variance(const LabeledDetections& calib, CategoryId category, int box_bins,
                         int conf_bins, int k_folds, std::uint64_t seed,
                         const BinningConfig& config) {
  BinningConfig cell = config;
  cell.n_conf_bins = conf_bins;
  return variance_from_samples(collect(calib, category), category, box_bins, cell, k_folds,
                               seed);
}

double estimate_bias(const LabeledDetections& calib, CategoryId category, int box_bins,
                     int conf_bins, const SearchGrid& grid, const SearchOptions& options) {
  const CategoryData data = collect(calib, category);
  const auto table = shift_table(data, category, grid, options);
  return bias_from_table(table, grid, box_bins, conf_bins);
}

double estimate_mse(double bias_hat, double variance) {
  if (bias_hat < 0.0 || variance < 0.0) {
    throw ParameterError("estimate_mse: components must be non-negative");
  }
  return bias_hat * bias_hat + variance;
}

SearchResult search(const LabeledDetections& calib, const SearchGrid& grid, Objective objective,
                    const SearchOptions& options) {
  SearchResult result;
  result.objective = objective;
  result.map.t_iou = calib.t_iou;
  result.map.config = grid.config;

  for (CategoryId category : detection_categories(calib)) {
    const CategoryData data = collect(calib, category);
    std::map<std::pair<int, int>, double> bias_table;
    if (objective == Objective::mse_hat) {
      bias_table = shift_table(data, category, grid, options);
    }

    CategoryResult cat_result;
    cat_result.category = category;
    bool have_choice = false;
    for (int b : grid.box_bins) {
      for (int c : grid.conf_bins) {
        CellScore score = score_cell_impl(data, category, b, c, objective, grid, options,
                                          objective == Objective::mse_hat ? &bias_table
                                                                          : nullptr);
        if (score.feasible && (!have_choice || better(score, cat_result.chosen))) {
          cat_result.chosen = score;
          have_choice = true;
        }
        cat_result.cells.push_back(score);
      }
    }
    cat_result.fallback = !have_choice;
    if (have_choice) {
      result.map.categories[category] = fit_conditional_samples(
          data.samples, data.areas, category, cat_result.chosen.box_bins,
          cell_config(grid, cat_result.chosen.conf_bins));
    } else {
      result.map.fallback_categories.push_back(category);
    }
    result.per_category.push_back(std::move(cat_result));
  }
  return result;
}

SearchResult oracle_select(const LabeledDetections& calib, const LabeledDetections& holdout,
                           const SearchGrid& grid, const SearchOptions& options) {
  (void)options;  // selection is fully determined by the hold-out AP
  SearchResult result;
  result.objective = Objective::ap;  // hold-out AP, maximized
  result.map.t_iou = calib.t_iou;
  result.map.config = grid.config;

  for (CategoryId category : detection_categories(calib)) {
    const CategoryData calib_data = collect(calib, category);
    const CategoryData holdout_data = collect(holdout, category);

    CategoryResult cat_result;
    cat_result.category = category;
    bool have_choice = false;
    for (int b : grid.box_bins) {
      for (int c : grid.conf_bins) {
        CellScore score;
        score.box_bins = b;
        score.conf_bins = c;
        try {
          const auto cond = fit_conditional_samples(calib_data.samples, calib_data.areas,
                                                    category, b, cell_config(grid, c));
          if (holdout_data.samples.empty() || holdout_data.gt_count == 0) {
            throw InvalidCellError("invalid cell: no hold-out data");
          }
          const auto calibrated = apply_to_samples(cond, holdout_data);
          score.value = -ap_of_samples(calibrated, holdout_data.gt_count, ApMode::interp101);
          score.feasible = true;
        } catch (const InvalidCellError&) {
          score.feasible = false;
        }
        if (score.feasible && (!have_choice || better(score, cat_result.chosen))) {
          cat_result.chosen = score;
          have_choice = true;
        }
        cat_result.cells.push_back(score);
      }
    }
    cat_result.fallback = !have_choice;
    if (have_choice) {
      result.map.categories[category] = fit_conditional_samples(
          calib_data.samples, calib_data.areas, category, cat_result.chosen.box_bins,
          cell_config(grid, cat_result.chosen.conf_bins));
    } else {
      result.map.fallback_categories.push_back(category);
    }
    result.per_category.push_back(std::move(cat_result));
  }
  return result;
}

nlohmann::json search_result_to_json(const SearchResult& result) {
  using nlohmann::json;
  json categories = json::array();
  for (const auto& cat : result.per_category) {
    json cells = json::array();
    for (const auto& cell : cat.cells) {
      json c = {{"B", cell.box_bins}, {"C", cell.conf_bins}, {"feasible", cell.feasible}};
      if (cell.feasible) {
        c["value"] = cell.value;
        if (cell.bias_hat) c["bias_hat"] = *cell.bias_hat;
        if (cell.variance) c["variance"] = *cell.variance;
      }
      cells.push_back(c);
    }
    json entry = {{"category", cat.category}, {"fallback", cat.fallback}, {"cells", cells}};
    if (!cat.fallback) {
      entry["chosen"] = {{"B", cat.chosen.box_bins},
                         {"C", cat.chosen.conf_bins},
                         {"value", cat.chosen.value}};
    }
    categories.push_back(entry);
  }
  return {{"format_version", 1},
          {"objective", objective_name(result.objective)},
          {"categories", categories}};
}

}  // namespace boxcal
