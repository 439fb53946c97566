#pragma once

#include <cstdint>
#include <vector>

#include "boxcal/error.hpp"

namespace boxcal {

/// A stochastic detector: TP probabilities in the order the detector ranks its
/// detections by confidence, labels drawn independently Bernoulli(p_i).
struct StochasticDetections {
  std::vector<double> p;      // each in (0, 1]
  std::size_t gt_count = 1;   // >= 1
};

/// Closed-form expected raw AP:
///   (1/|G|) * sum_i ((sum_{k<i} p_k + 1) / i) * p_i
double expected_ap_closed(const StochasticDetections& s);

/// Exact expectation by enumerating all 2^N label vectors. N <= 20.
double expected_ap_enumerate(const StochasticDetections& s);

struct MonteCarloResult {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MonteCarloResult expected_ap_monte_carlo(const StochasticDetections& s, std::size_t trials,
                                         std::uint64_t seed);

/// Permutation sorting p descending; stable (ties keep original order).
std::vector<std::size_t> optimal_order(const std::vector<double>& p);

}  // namespace boxcal
