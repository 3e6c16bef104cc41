#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

namespace dimest {

/// One-sample Kolmogorov-Smirnov statistic of an ascending sample against `cdf`:
/// max over k of max(k/N - F(x_k), F(x_k) - (k-1)/N).
template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    const double f = cdf(sorted[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return std::clamp(d, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov statistic of two ascending samples.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == t) ++i;
    while (j < b.size() && b[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace dimest
