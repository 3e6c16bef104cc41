#pragma once

// Rotational-symmetry check and the flattening transform x^i -> F(x^i), where F
// is the empirical distribution of all coordinates pooled together.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dimest/error.hpp"
#include "dimest/ks.hpp"
#include "dimest/parallel.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/random.hpp"

namespace dimest {

struct UniformityReport {
  std::size_t n_directions = 0;
  double max_ks = 0.0;     ///< largest two-sample K-S distance to the reference direction
  double threshold = 0.0;
  bool passed = false;     ///< max_ks <= threshold
  std::vector<double> per_direction_ks;  ///< entry 0 is the reference itself (0)
  double norm_mean = 0.0;  ///< mean distance to the centroid
  double norm_std = 0.0;   ///< its sample standard deviation
};

inline constexpr const char* kSymmetryReference = "first_direction";

/// Compares the distribution of the centred cloud projected onto each given unit
/// direction with the projection onto directions[0].
inline UniformityReport check_rotational_symmetry(const PointCloud& cloud,
                                                  const std::vector<std::vector<double>>& directions,
                                                  double threshold, std::size_t threads = 0) {
  if (directions.size() < 2) throw ValidationError("symmetry check needs at least 2 directions");
  if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("symmetry threshold must lie in (0,1)");
  const std::size_t n = cloud.size(), m = cloud.ambient_dim();
  for (const auto& u : directions)
    if (u.size() != m) throw ValidationError("direction dimension does not match the cloud");

  std::vector<double> mean(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) mean[j] += cloud(i, j);
  for (double& v : mean) v /= static_cast<double>(n);

  bool degenerate = true;
  for (std::size_t i = 1; i < n && degenerate; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (cloud(i, j) != cloud(0, j)) {
        degenerate = false;
        break;
      }
  if (degenerate) throw ValidationError("symmetry check on a degenerate cloud: all points are identical");

  auto project = [&](const std::vector<double>& u) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += (cloud(i, j) - mean[j]) * u[j];
      p[i] = s;
    }
    std::sort(p.begin(), p.end());
    return p;
  };

  UniformityReport report;
  report.n_directions = directions.size();
  report.threshold = threshold;
  report.per_direction_ks.assign(directions.size(), 0.0);
  const auto reference = project(directions[0]);
  parallel_for(directions.size() - 1, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k)
      report.per_direction_ks[k + 1] = ks_two_sample(reference, project(directions[k + 1]));
  });
  report.max_ks = *std::max_element(report.per_direction_ks.begin(), report.per_direction_ks.end());
  report.passed = report.max_ks <= threshold;

  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += (cloud(i, j) - mean[j]) * (cloud(i, j) - mean[j]);
    const double r = std::sqrt(s);
    sum += r;
    sum_sq += r * r;
  }
  report.norm_mean = sum / static_cast<double>(n);
  report.norm_std =
      std::sqrt(std::max(0.0, (sum_sq - sum * report.norm_mean) / static_cast<double>(n - 1)));
  return report;
}

/// Unit vectors uniform on the sphere S^{m-1} (normalised Gaussian draws).
inline std::vector<std::vector<double>> random_directions(std::size_t count, std::size_t m, RandomSource& rng) {
  std::vector<std::vector<double>> dirs(count, std::vector<double>(m));
  for (auto& u : dirs) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (double& v : u) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (double& v : u) v /= norm;
  }
  return dirs;
}

/// Draws `n_directions` random directions from `rng` and runs the check.
inline UniformityReport check_rotational_symmetry(const PointCloud& cloud, std::size_t n_directions,
                                                  double threshold, RandomSource& rng, std::size_t threads = 0) {
  if (n_directions < 2) throw ValidationError("symmetry check needs at least 2 directions");
  return check_rotational_symmetry(cloud, random_directions(n_directions, cloud.ambient_dim(), rng), threshold,
                                   threads);
}

/// Right-continuous empirical CDF of a pooled sample.
class FlatteningTransform {
 public:
  explicit FlatteningTransform(std::vector<double> pool) : pool_(std::move(pool)) {
    if (pool_.empty()) throw ValidationError("flattening pool is empty");
    std::sort(pool_.begin(), pool_.end());
  }

  /// #{pool values <= t} / pool size.
  double operator()(double t) const {
    const auto it = std::upper_bound(pool_.begin(), pool_.end(), t);
    return static_cast<double>(it - pool_.begin()) / static_cast<double>(pool_.size());
  }

  std::span<const double> sorted_pool() const noexcept { return pool_; }
  std::size_t pool_size() const noexcept { return pool_.size(); }

 private:
  std::vector<double> pool_;
};

/// Pools all N*m coordinates of the cloud into one empirical CDF.
inline FlatteningTransform build_flattening(const PointCloud& cloud) {
  return FlatteningTransform(std::vector<double>(cloud.data().begin(), cloud.data().end()));
}

/// Replaces every coordinate x by F(x); the result lies in [0,1]^m.
inline PointCloud apply_flattening(const PointCloud& cloud, const FlatteningTransform& transform) {
  std::vector<double> out(cloud.data().size());
  const auto in = cloud.data();
  for (std::size_t k = 0; k < in.size(); ++k) out[k] = transform(in[k]);
  return PointCloud(std::move(out), cloud.ambient_dim(), cloud.label());
}

}  // namespace dimest
