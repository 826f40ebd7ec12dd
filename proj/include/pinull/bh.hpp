#pragma once

// Graphical slope estimator of pi0 used by adaptive BH, and the closed-form
// tail law of its change-point index under uniform p-values.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pinull/estimate.hpp"

namespace pinull {

/// S_i = (1 - P_(i)) / (n + 1 - i) over the sorted p-values (0-based storage).
inline std::vector<double> bh_slopes(std::span<const double> pvalues) {
  if (pvalues.empty()) throw std::invalid_argument("bh_slopes: empty input");
  std::vector<double> sorted(pvalues.begin(), pvalues.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> slopes(n);
  for (std::size_t i = 0; i < n; ++i)
    slopes[i] = (1.0 - sorted[i]) / static_cast<double>(n - i);
  return slopes;
}

struct BhEstimate {
  std::optional<std::size_t> j;  // 1-based index of the first strict decrease
  std::size_t n_hat0 = 0;
  double pi0_hat = 1.0;
  std::vector<double> slopes;

  EstimateResult to_result() const {
    EstimateResult r{"bh", pi0_hat, {}};
    if (j) r.tuning.emplace_back("j", static_cast<double>(*j));
    r.tuning.emplace_back("n_hat0", static_cast<double>(n_hat0));
    return r;
  }
};

/// j = first i >= 2 with S_i < S_{i-1}; n0 = min(floor(1/S_j) + 1, n). Without a
/// decrease the estimate falls back to n0 = n.
inline BhEstimate bh_estimate(std::span<const double> pvalues) {
  if (pvalues.size() < 2) throw std::invalid_argument("bh_estimate: need at least 2 p-values");
  BhEstimate est;
  est.slopes = bh_slopes(pvalues);
  const std::size_t n = est.slopes.size();
  est.n_hat0 = n;
  for (std::size_t i = 1; i < n; ++i) {
    if (est.slopes[i] < est.slopes[i - 1]) {
      est.j = i + 1;
      const double count = std::floor(1.0 / est.slopes[i]) + 1.0;
      est.n_hat0 = count >= static_cast<double>(n) ? n : static_cast<std::size_t>(count);
      break;
    }
  }
  est.pi0_hat = static_cast<double>(est.n_hat0) / static_cast<double>(n);
  return est;
}

/// P(j > k) = prod_{m=1}^{k-1} (1 - ((n-m)/(n-m+1))^(n-m)) for iid uniform p-values.
inline double j_tail_probability(std::size_t n, std::size_t k) {
  if (k < 2 || k > n)
    throw std::invalid_argument("j_tail_probability: need 2 <= k <= n (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  double prob = 1.0;
  for (std::size_t m = 1; m < k; ++m) {
    const double r = static_cast<double>(n - m);
    prob *= -std::expm1(r * std::log1p(-1.0 / (r + 1.0)));
  }
  return prob;
}

}  // namespace pinull
