#pragma once

// Box-counting (Minkowski) dimension for sparse clouds.
//
// Occupied cells are found by hashing each point's cell index vector, so memory
// is O(distinct cells) <= O(N) whatever the ambient dimension; the grid itself
// is never enumerated.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimest/error.hpp"
#include "dimest/linear_fit.hpp"
#include "dimest/parallel.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/random.hpp"

namespace dimest {

struct BoxCountEntry {
  double r = 0.0;
  std::size_t occupied = 0;
};

struct BoxCountCurve {
  std::vector<BoxCountEntry> entries;  ///< r strictly decreasing
  std::vector<double> anchor;
  std::size_t n_points = 0;
  std::optional<double> r_saturation;  ///< largest r whose count equals n_points
};

/// How raw occupied-cell counts are turned into the fitted quantity.
enum class CountCorrection {
  none,       ///< fit log N(r) directly
  occupancy,  ///< fit log of the cell count implied by N(r) under Poisson occupancy
};

inline std::string_view to_string(CountCorrection c) { return c == CountCorrection::none ? "none" : "occupancy"; }

enum class MinkowskiFlag { saturated_region_excluded, short_linear_region, low_r_squared };

inline std::string_view to_string(MinkowskiFlag f) {
  switch (f) {
    case MinkowskiFlag::saturated_region_excluded: return "saturated_region_excluded";
    case MinkowskiFlag::short_linear_region: return "short_linear_region";
    case MinkowskiFlag::low_r_squared: return "low_r_squared";
  }
  return "";
}

struct BoxCountConfig {
  std::optional<double> r_max;               ///< default: largest bounding-box side
  std::optional<double> r_min;               ///< default: r_max / 1024
  std::size_t steps = 32;
  std::size_t min_window = 5;
  std::optional<std::vector<double>> anchor;  ///< default: coordinate-wise data minimum
  CountCorrection correction = CountCorrection::occupancy;
  std::size_t min_collisions = 50;  ///< admissibility under the occupancy correction
  std::size_t anchor_trials = 1;    ///< >1: minimum count over randomly shifted grids
  std::uint64_t seed = 0;           ///< only used when anchor_trials > 1
  std::size_t threads = 0;
};

struct MinkowskiEstimate {
  BoxCountCurve curve;
  SlopeFit fit;
  double dimension = 0.0;
  CountCorrection correction = CountCorrection::none;
  std::vector<double> fitted_log_counts;  ///< y values the window search saw (NaN where inadmissible)
  std::vector<MinkowskiFlag> flags;
};

inline constexpr double kLowRSquared = 0.99;

namespace detail {

inline constexpr double kMaxCellIndex = 4.6e18;  // just under 2^62

inline std::int64_t cell_index(double x, double anchor, double r) {
  const double q = std::floor((x - anchor) / r);
  if (!(std::abs(q) < kMaxCellIndex))
    throw ValidationError("cell index overflow: box side " + std::to_string(r) + " too small for coordinate " +
                          std::to_string(x));
  return static_cast<std::int64_t>(q);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// Number of distinct cells floor((P_i - anchor) / r) hit by the cloud.
///
/// Cell keys are compared exactly (a representative point's key is recomputed
/// on hash match), so the result is an exact count.
inline std::size_t count_occupied(const PointCloud& cloud, double r, std::span<const double> anchor) {
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("box side r must be positive and finite");
  const std::size_t m = cloud.ambient_dim();
  if (anchor.size() != m)
    throw ValidationError("anchor has " + std::to_string(anchor.size()) + " components, cloud has " +
                          std::to_string(m));
  const std::size_t n = cloud.size();
  const std::size_t capacity = std::bit_ceil(2 * n);
  const std::size_t mask = capacity - 1;
  constexpr std::size_t kEmpty = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> rep(capacity, kEmpty);
  std::vector<std::uint64_t> hashes(capacity, 0);
  std::vector<std::int64_t> key(m);
  std::size_t distinct = 0;

  auto same_cell = [&](std::size_t other) {
    const auto row = cloud.row(other);
    for (std::size_t j = 0; j < m; ++j)
      if (detail::cell_index(row[j], anchor[j], r) != key[j]) return false;
    return true;
  };

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = cloud.row(i);
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::size_t j = 0; j < m; ++j) {
      key[j] = detail::cell_index(row[j], anchor[j], r);
      h = detail::mix64(h ^ static_cast<std::uint64_t>(key[j]));
    }
    std::size_t slot = h & mask;
    while (true) {
      if (rep[slot] == kEmpty) {
        rep[slot] = i;
        hashes[slot] = h;
        ++distinct;
        break;
      }
      if (hashes[slot] == h && same_cell(rep[slot])) break;
      slot = (slot + 1) & mask;
    }
  }
  return distinct;
}

/// r_max * (r_min / r_max)^(k / (steps - 1)), k = 0..steps-1.
inline std::vector<double> geometric_radii(double r_max, double r_min, std::size_t steps) {
  if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max))
    throw ValidationError("need r_max > r_min > 0");
  if (steps < 2) throw ValidationError("need at least 2 radii");
  std::vector<double> radii(steps);
  const double ratio = r_min / r_max;
  for (std::size_t k = 0; k < steps; ++k)
    radii[k] = r_max * std::pow(ratio, static_cast<double>(k) / static_cast<double>(steps - 1));
  radii.front() = r_max;
  radii.back() = r_min;
  return radii;
}

/// Occupied-cell counts over a geometric sweep of box sides.
///
/// Different radii are counted concurrently; every count is exact, so the curve
/// does not depend on the worker count. With anchor_trials > 1 each entry is the
/// minimum over grids shifted by seeded fractions of a cell.
inline BoxCountCurve sweep(const PointCloud& cloud, double r_max, double r_min, std::size_t steps,
                           std::optional<std::vector<double>> anchor = {}, std::size_t threads = 0,
                           std::size_t anchor_trials = 1, std::uint64_t seed = 0) {
  if (steps < 8) throw ValidationError("sweep needs at least 8 steps");
  if (anchor_trials == 0) throw ValidationError("anchor_trials must be >= 1");
  BoxCountCurve curve;
  curve.n_points = cloud.size();
  curve.anchor = anchor ? *anchor : coordinate_min(cloud);
  if (curve.anchor.size() != cloud.ambient_dim())
    throw ValidationError("anchor has " + std::to_string(curve.anchor.size()) + " components, cloud has " +
                          std::to_string(cloud.ambient_dim()));
  const auto radii = geometric_radii(r_max, r_min, steps);

  std::vector<std::vector<double>> offsets(anchor_trials - 1, std::vector<double>(cloud.ambient_dim()));
  for (std::size_t t = 0; t + 1 < anchor_trials; ++t) {
    RandomSource rng = RandomSource(seed).fork(t + 1);
    for (double& u : offsets[t]) u = rng.uniform();
  }

  curve.entries.resize(steps);
  parallel_for(steps, threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> shifted(cloud.ambient_dim());
    for (std::size_t k = begin; k < end; ++k) {
      const double r = radii[k];
      std::size_t best = count_occupied(cloud, r, curve.anchor);
      for (const auto& off : offsets) {
        for (std::size_t j = 0; j < shifted.size(); ++j) shifted[j] = curve.anchor[j] - off[j] * r;
        best = std::min(best, count_occupied(cloud, r, shifted));
      }
      curve.entries[k] = {r, best};
    }
  });
  for (const auto& e : curve.entries)
    if (e.occupied == curve.n_points) {
      curve.r_saturation = e.r;
      break;
    }
  return curve;
}

/// Cell count M solving occupied = M (1 - exp(-N / M)): the expected number of
/// occupied cells when N points fall independently into M equally likely cells.
/// Infinite when every point sits in its own cell.
inline double occupancy_cell_estimate(std::size_t occupied, std::size_t n_points) {
  if (occupied == 0 || occupied > n_points) throw ValidationError("occupied count out of range");
  if (occupied == n_points) return std::numeric_limits<double>::infinity();
  const double q = static_cast<double>(occupied) / static_cast<double>(n_points);
  // g(x) = (1 - e^-x) / x decreases from 1 to 0; solve g(x) = q for x = N / M.
  auto g = [](double x) { return -std::expm1(-x) / x; };
  double lo = 1e-18, hi = std::max(4.0 / q, 1.0);
  for (int it = 0; it < 200 && hi > lo * (1.0 + 1e-15); ++it) {
    const double mid = std::sqrt(lo * hi);
    (g(mid) > q ? lo : hi) = mid;
  }
  return static_cast<double>(n_points) / (0.5 * (lo + hi));
}

namespace detail {

inline std::vector<double> neg_log_radii(const BoxCountCurve& curve) {
  std::vector<double> x;
  x.reserve(curve.entries.size());
  for (const auto& e : curve.entries) x.push_back(-std::log(e.r));
  return x;
}

inline SlopeFit fit_or_throw(std::span<const double> x, std::span<const double> y,
                             const std::vector<bool>& admissible, std::size_t min_window) {
  if (min_window < 4) throw ValidationError("min_window must be >= 4");
  auto fit = best_linear_window(x, y, admissible, min_window);
  if (!fit) throw SaturationError("curve fully saturated; increase r_max or reduce steps density");
  return *fit;
}

}  // namespace detail

/// Slope of log N(r) against -log r over the straightest window that avoids the
/// saturation plateau (entries with N(r) = N).
inline SlopeFit fit_linear_region(const BoxCountCurve& curve, std::size_t min_window) {
  const auto x = detail::neg_log_radii(curve);
  std::vector<double> y;
  std::vector<bool> admissible;
  for (const auto& e : curve.entries) {
    y.push_back(std::log(static_cast<double>(e.occupied)));
    admissible.push_back(e.occupied < curve.n_points);
  }
  return detail::fit_or_throw(x, y, admissible, min_window);
}

inline MinkowskiEstimate estimate_minkowski(const PointCloud& cloud, const BoxCountConfig& config = {}) {
  const double r_max = config.r_max.value_or(largest_extent(cloud));
  if (!(r_max > 0.0)) throw ValidationError("cloud has zero extent; all points coincide");
  const double r_min = config.r_min.value_or(r_max / 1024.0);

  MinkowskiEstimate est;
  est.correction = config.correction;
  est.curve = sweep(cloud, r_max, r_min, config.steps, config.anchor, config.threads, config.anchor_trials,
                    config.seed);

  const std::size_t n = est.curve.n_points;
  const std::size_t count = est.curve.entries.size();
  const auto x = detail::neg_log_radii(est.curve);
  std::vector<bool> admissible(count);
  est.fitted_log_counts.assign(count, std::numeric_limits<double>::quiet_NaN());
  bool dropped = false;
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t occ = est.curve.entries[k].occupied;
    if (config.correction == CountCorrection::none) {
      admissible[k] = occ < n;
      if (admissible[k]) est.fitted_log_counts[k] = std::log(static_cast<double>(occ));
    } else {
      admissible[k] = n - occ >= std::max<std::size_t>(config.min_collisions, 1);
      if (admissible[k]) est.fitted_log_counts[k] = std::log(occupancy_cell_estimate(occ, n));
    }
    dropped = dropped || !admissible[k];
  }
  std::vector<double> y(est.fitted_log_counts);
  for (std::size_t k = 0; k < count; ++k)
    if (!admissible[k]) y[k] = 0.0;
  est.fit = detail::fit_or_throw(x, y, admissible, config.min_window);
  est.dimension = est.fit.slope;
  if (dropped) est.flags.push_back(MinkowskiFlag::saturated_region_excluded);
  if (est.fit.length() == config.min_window) est.flags.push_back(MinkowskiFlag::short_linear_region);
  if (est.fit.r_squared < kLowRSquared) est.flags.push_back(MinkowskiFlag::low_r_squared);
  return est;
}

}  // namespace dimest
