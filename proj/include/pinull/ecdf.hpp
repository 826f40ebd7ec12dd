#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace pinull {

/// Nondecreasing, non-empty sample; the support points of the empirical cdf.
class SortedSample {
public:
  explicit SortedSample(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("SortedSample: empty sample");
    if (!std::is_sorted(values_.begin(), values_.end()))
      throw std::invalid_argument("SortedSample: values must be nondecreasing");
  }

  static SortedSample from_unsorted(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return SortedSample(std::move(values));
  }

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

private:
  std::vector<double> values_;
};

/// F_n at each order statistic; tied points get the upper step value.
inline std::vector<double> ecdf_at_sample(const SortedSample& sample) {
  const auto x = sample.values();
  const std::size_t n = x.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> out(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && x[j] == x[i]) ++j;
    const double v = static_cast<double>(j) * inv_n;
    std::fill(out.begin() + i, out.begin() + j, v);
    i = j;
  }
  return out;
}

/// L2(F_n) distance between two functions tabulated at the sample points.
inline double dn_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw std::invalid_argument("dn_distance: length mismatch");
  if (f.empty()) throw std::invalid_argument("dn_distance: empty input");
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(f.size()));
}

/// Exact Kolmogorov-Smirnov distance sup_x |F_n(x) - F(x)| for continuous F.
template <class Cdf>
double sup_norm_to_cdf(const SortedSample& sample, Cdf&& cdf) {
  const auto x = sample.values();
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, std::abs(static_cast<double>(i + 1) / n - f),
                  std::abs(static_cast<double>(i) / n - f)});
  }
  return d;
}

}  // namespace pinull
