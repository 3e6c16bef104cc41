#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dimest/error.hpp"
#include "dimest/parallel.hpp"
#include "dimest/point_cloud.hpp"

namespace dimest {

struct NeighborDistances {
  std::vector<double> d_min;  ///< Euclidean distance from each point to its nearest other point
  double global_min = 0.0;
  double zero_fraction = 0.0;
};

/// Squared Euclidean distance, summed in coordinate order.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

namespace detail {

// Same summation as squared_distance, abandoned once the partial sum exceeds
// `bound`. A returned value <= bound is bit-identical to squared_distance.
inline double squared_distance_bounded(std::span<const double> a, std::span<const double> b, double bound) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
    if (s > bound) return s;
  }
  return s;
}

inline NeighborDistances summarize(std::vector<double> d_min) {
  NeighborDistances out;
  out.global_min = *std::min_element(d_min.begin(), d_min.end());
  const auto zeros = std::count(d_min.begin(), d_min.end(), 0.0);
  out.zero_fraction = static_cast<double>(zeros) / static_cast<double>(d_min.size());
  out.d_min = std::move(d_min);
  return out;
}

}  // namespace detail

/// Exact nearest-neighbour distances by full pairwise scan. O(N^2); the
/// reference every accelerated path is checked against.
inline NeighborDistances nn_distances_bruteforce(const PointCloud& cloud, std::size_t threads = 0) {
  const std::size_t n = cloud.size();
  std::vector<double> d(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      const auto p = cloud.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        best = std::min(best, squared_distance(p, cloud.row(j)));
      }
      d[i] = std::sqrt(best);
    }
  });
  return detail::summarize(std::move(d));
}

/// Exact k-d tree over a point cloud (k-nearest queries for small k).
///
/// Pruning only discards subtrees whose split-plane gap already exceeds the
/// current k-th best squared distance, and candidate distances use the same
/// summation as squared_distance, so results equal the brute-force scan bit
/// for bit.
class KdTree {
 public:
  explicit KdTree(const PointCloud& cloud, std::size_t leaf_size = 16) : cloud_(cloud), leaf_size_(leaf_size) {
    order_.resize(cloud.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * cloud.size() / std::max<std::size_t>(leaf_size_, 1) + 1);
    build(0, cloud.size());
  }

  /// Squared distances to the k nearest points other than `self`, ascending.
  template <std::size_t K>
  std::array<double, K> nearest(std::size_t self) const {
    std::array<double, K> best;
    best.fill(std::numeric_limits<double>::infinity());
    search(0, cloud_.row(self), self, best);
    return best;
  }

 private:
  struct Node {
    std::size_t begin = 0, end = 0;
    std::size_t left = 0, right = 0;
    std::size_t dim = 0;
    double split = 0.0;
    bool leaf = true;
  };

  std::size_t build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end});
    if (end - begin <= leaf_size_) return id;

    const std::size_t m = cloud_.ambient_dim();
    std::size_t dim = 0;
    double widest = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t k = begin; k < end; ++k) {
        const double v = cloud_(order_[k], j);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi - lo > widest) {
        widest = hi - lo;
        dim = j;
      }
    }
    if (widest == 0.0) return id;  // all points coincide

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return cloud_(a, dim) < cloud_(b, dim); });
    const double split = cloud_(order_[mid], dim);
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& node = nodes_[id];
    node.leaf = false;
    node.dim = dim;
    node.split = split;
    node.left = left;
    node.right = right;
    return id;
  }

  template <std::size_t K>
  void search(std::size_t id, std::span<const double> q, std::size_t self, std::array<double, K>& best) const {
    const Node& node = nodes_[id];
    if (node.leaf) {
      for (std::size_t k = node.begin; k < node.end; ++k) {
        const std::size_t j = order_[k];
        if (j == self) continue;
        const double d = detail::squared_distance_bounded(q, cloud_.row(j), best[K - 1]);
        if (d < best[K - 1]) {
          std::size_t pos = K - 1;
          while (pos > 0 && best[pos - 1] > d) {
            best[pos] = best[pos - 1];
            --pos;
          }
          best[pos] = d;
        }
      }
      return;
    }
    // Left holds coordinates <= split, right holds coordinates >= split.
    const double v = q[node.dim];
    const bool go_left = v < node.split;
    search(go_left ? node.left : node.right, q, self, best);
    const double gap = go_left ? node.split - v : v - node.split;
    if (gap * gap <= best[K - 1]) search(go_left ? node.right : node.left, q, self, best);
  }

  const PointCloud& cloud_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Exact nearest-neighbour distances via a k-d tree; equal to
/// nn_distances_bruteforce on every input.
inline NeighborDistances nn_distances(const PointCloud& cloud, std::size_t threads = 0) {
  const KdTree tree(cloud);
  std::vector<double> d(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) d[i] = std::sqrt(tree.nearest<1>(i)[0]);
  });
  return detail::summarize(std::move(d));
}

/// Distances to the nearest and second-nearest other point.
struct NeighborPairDistances {
  std::vector<double> first;
  std::vector<double> second;
};

inline NeighborPairDistances nn2_distances(const PointCloud& cloud, std::size_t threads = 0) {
  const KdTree tree(cloud);
  NeighborPairDistances out;
  out.first.resize(cloud.size());
  out.second.resize(cloud.size());
  parallel_for(cloud.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto b = tree.nearest<2>(i);
      out.first[i] = std::sqrt(b[0]);
      out.second[i] = std::sqrt(b[1]);
    }
  });
  return out;
}

/// One distance per line, row order matching the cloud.
inline std::string format_distances_csv(const NeighborDistances& nd) {
  std::string out;
  char buf[32];
  for (double v : nd.d_min) {
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
    out.push_back('\n');
  }
  return out;
}

}  // namespace dimest
