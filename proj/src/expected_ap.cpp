#include "boxcal/expected_ap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "boxcal/eval_metrics.hpp"

namespace boxcal {

namespace {

void validate(const StochasticDetections& s) {
  if (s.gt_count < 1) throw ParameterError("gt_count must be >= 1");
  for (double p : s.p) {
    if (p <= 0.0 || p > 1.0) throw ParameterError("p values must be in (0, 1]");
  }
}

}  // namespace

double expected_ap_closed(const StochasticDetections& s) {
  validate(s);
  double sum = 0.0;
  double prefix = 0.0;  // sum_{k<i} p_k
  for (std::size_t i = 0; i < s.p.size(); ++i) {
    sum += (prefix + 1.0) / static_cast<double>(i + 1) * s.p[i];
    prefix += s.p[i];
  }
  return sum / static_cast<double>(s.gt_count);
}

double expected_ap_enumerate(const StochasticDetections& s) {
  validate(s);
  const std::size_t n = s.p.size();
  if (n > 20) throw ParameterError("enumeration capped at N = 20");
  double total = 0.0;
  std::vector<int> labels(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double prob = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool tp = (mask >> i) & 1;
      labels[i] = tp ? 1 : 0;
      prob *= tp ? s.p[i] : 1.0 - s.p[i];
    }
    if (prob == 0.0) continue;
    total += prob * ap_raw_from_labels(labels, s.gt_count);
  }
  return total;
}

MonteCarloResult expected_ap_monte_carlo(const StochasticDetections& s, std::size_t trials,
                                         std::uint64_t seed) {
  validate(s);
  if (trials < 1) throw ParameterError("trials must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> labels(s.p.size());
  // Compensated summation keeps the mean stable over large trial counts.
  double sum = 0.0, sum_sq = 0.0, comp = 0.0, comp_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (std::size_t i = 0; i < s.p.size(); ++i) {
      labels[i] = unit(rng) < s.p[i] ? 1 : 0;
    }
    const double ap = ap_raw_from_labels(labels, s.gt_count);
    double y = ap - comp;
    double tmp = sum + y;
    comp = (tmp - sum) - y;
    sum = tmp;
    y = ap * ap - comp_sq;
    tmp = sum_sq + y;
    comp_sq = (tmp - sum_sq) - y;
    sum_sq = tmp;
  }
  MonteCarloResult result;
  result.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var =
        std::max(0.0, (sum_sq - sum * result.mean) / static_cast<double>(trials - 1));
    result.stderr_ = std::sqrt(var / static_cast<double>(trials));
  }
  return result;
}

std::vector<std::size_t> optimal_order(const std::vector<double>& p) {
  if (p.empty()) throw ParameterError("optimal_order: empty input");
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&p](std::size_t a, std::size_t b) { return p[a] > p[b]; });
  return order;
}

}  // namespace boxcal
