#pragma once

// Grassberger-Procaccia correlation dimension: slope of log rho(r) against
// log r, where rho(r) is the fraction of point pairs closer than r.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "dimest/boxcount.hpp"
#include "dimest/error.hpp"
#include "dimest/linear_fit.hpp"
#include "dimest/neighbors.hpp"
#include "dimest/parallel.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/random.hpp"

namespace dimest {

struct CorrelationEntry {
  double r = 0.0;
  double rho = 0.0;
  std::uint64_t pairs = 0;  ///< unordered pairs at distance < r
};

struct CorrelationConfig {
  std::optional<double> r_max;  ///< default: bounding-box diagonal
  std::optional<double> r_min;  ///< default: r_max / 1024
  std::size_t steps = 32;
  std::size_t min_window = 5;
  /// A radius enters the fit only if points have on average at least this many
  /// neighbours within it (2 * pairs / N).
  double min_mean_neighbors = 1.0;
  std::size_t max_points = 20000;  ///< larger clouds are subsampled (seeded)
  std::uint64_t seed = 0;
  std::size_t threads = 0;
};

struct CorrelationCurve {
  std::vector<CorrelationEntry> entries;  ///< r strictly decreasing
  SlopeFit fit;
  double dimension = 0.0;
  std::size_t points_used = 0;
  bool subsampled = false;
  std::vector<MinkowskiFlag> flags;
};

/// Unordered pair counts with distance strictly below each radius.
inline std::vector<std::uint64_t> count_close_pairs(const PointCloud& cloud, std::span<const double> radii,
                                                    std::size_t threads = 0) {
  // Bin each pair by the number of radii its distance is below; the ascending
  // copy makes that a single upper_bound.
  std::vector<double> ascending(radii.begin(), radii.end());
  std::sort(ascending.begin(), ascending.end());
  const std::size_t n = cloud.size(), k = ascending.size();
  const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
  std::vector<std::vector<std::uint64_t>> local(workers, std::vector<std::uint64_t>(k + 1, 0));
  // Rows are dealt round-robin so the triangular workload is balanced; integer
  // sums make the total independent of the split.
  parallel_for(workers, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      auto& hist = local[w];
      for (std::size_t i = w; i < n; i += workers) {
        const auto p = cloud.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
          const double dist = std::sqrt(squared_distance(p, cloud.row(j)));
          // index of the first radius > dist: the pair counts for that radius and above
          const auto pos = std::upper_bound(ascending.begin(), ascending.end(), dist) - ascending.begin();
          ++hist[static_cast<std::size_t>(pos)];
        }
      }
    }
  });
  std::vector<std::uint64_t> below_ascending(k, 0);
  std::uint64_t running = 0;
  for (std::size_t b = 0; b < k; ++b) {
    for (const auto& hist : local) running += hist[b];
    below_ascending[b] = running;
  }
  // Map back to the caller's radius order.
  std::vector<std::uint64_t> out(k);
  for (std::size_t q = 0; q < k; ++q) {
    const auto pos = std::lower_bound(ascending.begin(), ascending.end(), radii[q]) - ascending.begin();
    out[q] = below_ascending[static_cast<std::size_t>(pos)];
  }
  return out;
}

/// Exact fraction of unordered pairs at distance < r.
inline double correlation_integral(const PointCloud& cloud, double r, std::size_t threads = 0) {
  if (!(r > 0.0)) throw ValidationError("radius must be positive");
  const double radii[1] = {r};
  const auto pairs = count_close_pairs(cloud, radii, threads)[0];
  const double n = static_cast<double>(cloud.size());
  return static_cast<double>(pairs) / (n * (n - 1.0) / 2.0);
}

inline double bounding_box_diagonal(const PointCloud& cloud) {
  std::vector<double> lo(cloud.row(0).begin(), cloud.row(0).end()), hi = lo;
  for (std::size_t i = 1; i < cloud.size(); ++i)
    for (std::size_t j = 0; j < cloud.ambient_dim(); ++j) {
      lo[j] = std::min(lo[j], cloud(i, j));
      hi[j] = std::max(hi[j], cloud(i, j));
    }
  double s = 0.0;
  for (std::size_t j = 0; j < lo.size(); ++j) s += (hi[j] - lo[j]) * (hi[j] - lo[j]);
  return std::sqrt(s);
}

/// Rows of a seeded uniform subset of size `count`, in original order.
inline PointCloud random_subset(const PointCloud& cloud, std::size_t count, std::uint64_t seed) {
  if (count >= cloud.size()) return cloud;
  std::vector<std::size_t> all(cloud.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<std::size_t> picked;
  picked.reserve(count);
  RandomSource rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(picked), count, rng.engine());
  std::vector<double> coords;
  coords.reserve(count * cloud.ambient_dim());
  for (std::size_t i : picked) {
    const auto row = cloud.row(i);
    coords.insert(coords.end(), row.begin(), row.end());
  }
  return PointCloud(std::move(coords), cloud.ambient_dim(), cloud.label());
}

inline CorrelationCurve estimate_correlation_dimension(const PointCloud& input, const CorrelationConfig& config = {}) {
  if (config.max_points < 2) throw ValidationError("max_points must be >= 2");
  CorrelationCurve curve;
  curve.subsampled = input.size() > config.max_points;
  const PointCloud cloud = curve.subsampled ? random_subset(input, config.max_points, config.seed) : input;
  curve.points_used = cloud.size();

  const double r_max = config.r_max.value_or(bounding_box_diagonal(cloud));
  if (!(r_max > 0.0)) throw ValidationError("cloud has zero extent; all points coincide");
  const double r_min = config.r_min.value_or(r_max / 1024.0);
  if (config.steps < 8) throw ValidationError("sweep needs at least 8 steps");
  const auto radii = geometric_radii(r_max, r_min, config.steps);
  const auto pairs = count_close_pairs(cloud, radii, config.threads);

  const double n = static_cast<double>(cloud.size());
  const std::uint64_t total = static_cast<std::uint64_t>(cloud.size()) * (cloud.size() - 1) / 2;
  std::vector<double> x, y;
  std::vector<bool> admissible;
  bool any_positive = false, dropped = false;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    const double rho = static_cast<double>(pairs[k]) / (n * (n - 1.0) / 2.0);
    curve.entries.push_back({radii[k], rho, pairs[k]});
    any_positive = any_positive || pairs[k] > 0;
    const double mean_neighbors = 2.0 * static_cast<double>(pairs[k]) / n;
    const bool ok = pairs[k] > 0 && pairs[k] < total && mean_neighbors >= config.min_mean_neighbors;
    dropped = dropped || !ok;
    admissible.push_back(ok);
    x.push_back(std::log(radii[k]));
    y.push_back(ok ? std::log(rho) : 0.0);
  }
  if (!any_positive) throw ValidationError("r range below smallest pairwise distance");
  if (config.min_window < 4) throw ValidationError("min_window must be >= 4");
  const auto fit = best_linear_window(x, y, admissible, config.min_window);
  if (!fit)
    throw SaturationError("no admissible window: too few pairs or rho = 1 across the sweep; widen the r range");
  curve.fit = *fit;
  curve.dimension = fit->slope;
  if (dropped) curve.flags.push_back(MinkowskiFlag::saturated_region_excluded);
  if (fit->length() == config.min_window) curve.flags.push_back(MinkowskiFlag::short_linear_region);
  if (fit->r_squared < kLowRSquared) curve.flags.push_back(MinkowskiFlag::low_r_squared);
  return curve;
}

}  // namespace dimest
