#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pinull {

/// Common output of every pi0 estimator: the point estimate plus whatever
/// tuning quantities the estimator selected (j, lambda*, c_n, ...), in order.
struct EstimateResult {
  std::string estimator;
  double pi0_hat = 1.0;
  std::vector<std::pair<std::string, double>> tuning;

  std::optional<double> find(const std::string& key) const {
    for (const auto& [k, v] : tuning)
      if (k == key) return v;
    return std::nullopt;
  }
};

}  // namespace pinull
