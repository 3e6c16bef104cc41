#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dimest/error.hpp"

namespace dimest {

/// N points in R^m stored row-major. Immutable after construction, so it can be
/// shared read-only between workers.
class PointCloud {
 public:
  PointCloud(std::vector<double> coords, std::size_t ambient_dim, std::string label = {})
      : coords_(std::move(coords)), ambient_dim_(ambient_dim), label_(std::move(label)) {
    if (ambient_dim_ == 0) throw ValidationError("point cloud needs ambient dimension >= 1");
    if (coords_.size() % ambient_dim_ != 0)
      throw ValidationError("coordinate count " + std::to_string(coords_.size()) +
                            " is not a multiple of ambient dimension " + std::to_string(ambient_dim_));
    n_points_ = coords_.size() / ambient_dim_;
    if (n_points_ < 2)
      throw ValidationError("point cloud needs at least 2 points, got " + std::to_string(n_points_));
    for (std::size_t k = 0; k < coords_.size(); ++k) {
      if (!std::isfinite(coords_[k]))
        throw ValidationError("non-finite coordinate at row " + std::to_string(k / ambient_dim_) +
                              ", column " + std::to_string(k % ambient_dim_));
    }
  }

  std::size_t size() const noexcept { return n_points_; }
  std::size_t ambient_dim() const noexcept { return ambient_dim_; }
  const std::string& label() const noexcept { return label_; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {coords_.data() + i * ambient_dim_, ambient_dim_};
  }
  double operator()(std::size_t i, std::size_t j) const noexcept { return coords_[i * ambient_dim_ + j]; }
  std::span<const double> data() const noexcept { return coords_; }

  PointCloud with_label(std::string label) const { return PointCloud(coords_, ambient_dim_, std::move(label)); }

  /// Coordinate-wise equality; labels are metadata and do not participate.
  friend bool operator==(const PointCloud& a, const PointCloud& b) {
    return a.ambient_dim_ == b.ambient_dim_ && a.coords_ == b.coords_;
  }

 private:
  std::vector<double> coords_;
  std::size_t ambient_dim_ = 0;
  std::size_t n_points_ = 0;
  std::string label_;
};

/// Ordered subset of coordinate axes to keep.
struct AxisProjection {
  std::vector<std::size_t> axis_indices;
  std::string source_label;

  /// Axes [first, last).
  static AxisProjection range(std::size_t first, std::size_t last, std::string label = {}) {
    AxisProjection p{{}, std::move(label)};
    for (std::size_t k = first; k < last; ++k) p.axis_indices.push_back(k);
    return p;
  }
};

/// Keeps the listed columns. Indices must be strictly increasing and in range.
inline PointCloud project_axes(const PointCloud& cloud, const AxisProjection& projection) {
  const auto& axes = projection.axis_indices;
  if (axes.empty()) throw ValidationError("axis projection is empty");
  for (std::size_t k = 0; k < axes.size(); ++k) {
    if (axes[k] >= cloud.ambient_dim())
      throw ValidationError("axis index " + std::to_string(axes[k]) + " out of range for ambient dimension " +
                            std::to_string(cloud.ambient_dim()));
    if (k > 0 && axes[k] <= axes[k - 1]) throw ValidationError("axis indices must be strictly increasing");
  }
  std::vector<double> out;
  out.reserve(cloud.size() * axes.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto row = cloud.row(i);
    for (std::size_t a : axes) out.push_back(row[a]);
  }
  std::string label = projection.source_label.empty() ? cloud.label() : projection.source_label;
  return PointCloud(std::move(out), axes.size(), std::move(label));
}

/// Rows 0, step, 2*step, ... truncated to `limit` rows when given.
inline PointCloud subsample(const PointCloud& cloud, std::size_t step, std::optional<std::size_t> limit = {}) {
  if (step == 0) throw ValidationError("subsample step must be >= 1");
  const std::size_t m = cloud.ambient_dim();
  std::size_t rows = (cloud.size() + step - 1) / step;
  if (limit) rows = std::min(rows, *limit);
  if (rows < 2) throw ValidationError("subsample leaves fewer than 2 points");
  std::vector<double> out;
  out.reserve(rows * m);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = cloud.row(r * step);
    out.insert(out.end(), row.begin(), row.end());
  }
  return PointCloud(std::move(out), m, cloud.label());
}

/// Coordinate-wise minimum of the cloud.
inline std::vector<double> coordinate_min(const PointCloud& cloud) {
  std::vector<double> lo(cloud.row(0).begin(), cloud.row(0).end());
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    const auto row = cloud.row(i);
    for (std::size_t j = 0; j < lo.size(); ++j) lo[j] = std::min(lo[j], row[j]);
  }
  return lo;
}

/// Largest side of the axis-aligned bounding box.
inline double largest_extent(const PointCloud& cloud) {
  std::vector<double> lo(cloud.row(0).begin(), cloud.row(0).end());
  std::vector<double> hi = lo;
  for (std::size_t i = 1; i < cloud.size(); ++i) {
    const auto row = cloud.row(i);
    for (std::size_t j = 0; j < lo.size(); ++j) {
      lo[j] = std::min(lo[j], row[j]);
      hi[j] = std::max(hi[j], row[j]);
    }
  }
  double extent = 0.0;
  for (std::size_t j = 0; j < lo.size(); ++j) extent = std::max(extent, hi[j] - lo[j]);
  return extent;
}

}  // namespace dimest
