#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "dimest/error.hpp"

namespace dimest {

/// Least-squares line over a contiguous window of a curve.
struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t first = 0;  ///< first curve index in the window
  std::size_t last = 0;   ///< last curve index in the window (inclusive)

  std::size_t length() const noexcept { return last - first + 1; }
};

/// Ordinary least squares of y on x over [first, last]. A window with no spread
/// in y carries no evidence of a slope and gets r^2 = 0.
inline SlopeFit fit_window(std::span<const double> x, std::span<const double> y, std::size_t first,
                           std::size_t last) {
  const double n = static_cast<double>(last - first + 1);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = first; k <= last; ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  SlopeFit fit;
  fit.first = first;
  fit.last = last;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  if (syy > 0.0 && sxx > 0.0) {
    double ss_res = 0.0;
    for (std::size_t k = first; k <= last; ++k) {
      const double e = y[k] - (fit.intercept + fit.slope * x[k]);
      ss_res += e * e;
    }
    fit.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  }
  return fit;
}

/// Best straight window of a curve.
///
/// Considers every contiguous run of at least `min_window` admissible entries
/// and returns the one with the largest r^2, ties going to the longer window and
/// then to the smaller starting index. Returns nullopt when no run is long enough.
inline std::optional<SlopeFit> best_linear_window(std::span<const double> x, std::span<const double> y,
                                                  const std::vector<bool>& admissible, std::size_t min_window) {
  if (min_window < 2) throw ValidationError("min_window must be >= 2");
  std::optional<SlopeFit> best;
  const std::size_t count = x.size();
  for (std::size_t first = 0; first < count; ++first) {
    for (std::size_t last = first; last < count; ++last) {
      if (!admissible[last]) break;
      if (last - first + 1 < min_window) continue;
      const SlopeFit fit = fit_window(x, y, first, last);
      if (!best || fit.r_squared > best->r_squared ||
          (fit.r_squared == best->r_squared && fit.length() > best->length())) {
        best = fit;
      }
    }
  }
  return best;
}

}  // namespace dimest
