#pragma once

// Nearest-neighbour exponentiality test.
//
// For points spread uniformly over an n-dimensional region, the ball volume
// V^n(d_min) around each point up to its nearest neighbour is exponentially
// distributed. Scanning candidate n, the right one makes mean^2 equal the
// variance and minimises the K-S distance to the fitted exponential.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dimest/error.hpp"
#include "dimest/flatten.hpp"
#include "dimest/ks.hpp"
#include "dimest/neighbors.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/random.hpp"

namespace dimest {

/// ln V^n(t) = (n/2) ln(pi) + n ln(t) - lnGamma(n/2 + 1), for t > 0.
inline double log_ball_volume(unsigned n, double t) {
  const double half = 0.5 * static_cast<double>(n);
  return half * std::log(std::numbers::pi) + static_cast<double>(n) * std::log(t) - std::lgamma(half + 1.0);
}

/// Volume of the n-ball of radius t.
inline double ball_volume(unsigned n, double t) {
  if (n == 0) throw ValidationError("ball dimension must be >= 1");
  if (!(t >= 0.0)) throw ValidationError("ball radius must be non-negative");
  return t == 0.0 ? 0.0 : std::exp(log_ball_volume(n, t));
}

struct ExponentialKs {
  double ks = 0.0;
  double lambda = 0.0;  ///< maximum-likelihood intensity 1 / mean
};

/// K-S distance between a non-negative sample and the exponential law fitted to
/// it by maximum likelihood.
inline ExponentialKs ks_exponential(std::span<const double> samples) {
  if (samples.size() < 2) throw ValidationError("exponential fit needs at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() < 0.0) throw ValidationError("exponential fit needs non-negative samples");
  if (sorted.back() == 0.0) throw DegenerateError("degenerate distances; dataset has duplicate points");
  double sum = 0.0;
  for (double v : sorted) sum += v;
  const double lambda = static_cast<double>(sorted.size()) / sum;
  const double ks = ks_statistic(sorted, [lambda](double x) { return -std::expm1(-lambda * x); });
  return {ks, lambda};
}

struct DimensionCandidate {
  unsigned n = 0;
  double a1 = 0.0;          ///< mean of V^n(d_min)
  double a2 = 0.0;          ///< unbiased variance of V^n(d_min)
  double a1_squared = 0.0;
  double moment_ratio = 0.0;  ///< a1^2 / a2, computed on rescaled samples
  double ks = 0.0;
  double lambda_hat = 0.0;
};

enum class Confidence { high, low };

inline std::string_view to_string(Confidence c) { return c == Confidence::high ? "high" : "low"; }

enum class ScanWarning { high_zero_fraction, no_moment_match, flattening_waived, near_duplicates };

inline std::string_view to_string(ScanWarning w) {
  switch (w) {
    case ScanWarning::high_zero_fraction: return "high_zero_fraction";
    case ScanWarning::no_moment_match: return "no_moment_match";
    case ScanWarning::flattening_waived: return "flattening_waived";
    case ScanWarning::near_duplicates: return "near_duplicates";
  }
  return "";
}

struct DimensionScanResult {
  std::vector<DimensionCandidate> candidates;
  std::optional<unsigned> selected_n;
  Confidence confidence = Confidence::low;
  std::vector<ScanWarning> warnings;
  double zero_fraction = 0.0;
  double moment_tolerance = 0.0;

  bool has_warning(ScanWarning w) const { return std::find(warnings.begin(), warnings.end(), w) != warnings.end(); }
};

inline constexpr double kHighZeroFraction = 0.001;

/// Picks the dimension from a candidate list: the smallest K-S among candidates
/// with |a1^2/a2 - 1| <= tolerance (high confidence), else the smallest K-S
/// overall (low confidence). Ties go to the smaller n.
inline void select_dimension(DimensionScanResult& result) {
  const DimensionCandidate* best = nullptr;
  for (const auto& c : result.candidates)
    if (std::abs(c.moment_ratio - 1.0) <= result.moment_tolerance && (!best || c.ks < best->ks)) best = &c;
  result.confidence = Confidence::high;
  if (!best) {
    result.confidence = Confidence::low;
    result.warnings.push_back(ScanWarning::no_moment_match);
    for (const auto& c : result.candidates)
      if (!best || c.ks < best->ks) best = &c;
  }
  if (best) result.selected_n = best->n;
}

/// Evaluates every candidate n in [n_min, n_max] on the nearest-neighbour
/// distances and selects the dimension.
inline DimensionScanResult scan_dimensions(const NeighborDistances& distances, unsigned n_min, unsigned n_max,
                                           double moment_tolerance = 0.2) {
  if (n_min < 1 || n_max < n_min) throw ValidationError("dimension range must satisfy 1 <= n_min <= n_max");
  if (!(moment_tolerance > 0.0)) throw ValidationError("moment tolerance must be positive");
  const auto& d = distances.d_min;
  if (d.size() < 2) throw ValidationError("need at least 2 distances");
  if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; }))
    throw DegenerateError("degenerate distances; dataset has duplicate points");

  DimensionScanResult result;
  result.moment_tolerance = moment_tolerance;
  result.zero_fraction = distances.zero_fraction;

  // V^n is increasing in d, so one sort orders the samples for every n.
  // Samples are divided by their largest value before moments are taken so
  // that large n cannot overflow; the ratio and the K-S statistic are scale-free.
  std::vector<double> sorted(d.begin(), d.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> scaled(sorted.size());
  const double count = static_cast<double>(sorted.size());
  for (unsigned n = n_min; n <= n_max; ++n) {
    const double top = log_ball_volume(n, sorted.back());
    double mean = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      scaled[i] = sorted[i] > 0.0 ? std::exp(log_ball_volume(n, sorted[i]) - top) : 0.0;
      mean += scaled[i];
    }
    mean /= count;
    double var = 0.0;
    for (double s : scaled) var += (s - mean) * (s - mean);
    var /= count - 1.0;

    DimensionCandidate c;
    c.n = n;
    c.a1 = std::exp(top) * mean;
    c.a2 = std::exp(2.0 * top) * var;
    c.a1_squared = c.a1 * c.a1;
    c.moment_ratio = var > 0.0 ? mean * mean / var : std::numeric_limits<double>::infinity();
    const double rate = 1.0 / mean;
    c.ks = ks_statistic(scaled, [rate](double x) { return -std::expm1(-rate * x); });
    c.lambda_hat = 1.0 / c.a1;
    result.candidates.push_back(c);
  }
  select_dimension(result);
  if (distances.zero_fraction > kHighZeroFraction) result.warnings.push_back(ScanWarning::high_zero_fraction);
  return result;
}

struct ProbabilisticConfig {
  bool flatten = true;
  unsigned n_min = 1;
  unsigned n_max = 64;
  double moment_tolerance = 0.2;
  std::size_t symmetry_directions = 1000;
  double symmetry_threshold = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  /// A point is a near duplicate when d_min < ratio * (distance to its second neighbour).
  double near_duplicate_ratio = 1e-3;
  /// Fraction of near duplicates above which the near_duplicates warning fires.
  double near_duplicate_alarm = 0.01;
};

struct ProbabilisticResult {
  DimensionScanResult scan;
  std::optional<UniformityReport> symmetry;
  bool flattened = false;  ///< distances were measured on the flattened cloud
  double near_duplicate_fraction = 0.0;
  std::size_t near_duplicate_count = 0;
};

/// Full pipeline: symmetry check, flattening, nearest-neighbour distances,
/// dimension scan.
inline ProbabilisticResult estimate_probabilistic(const PointCloud& cloud, const ProbabilisticConfig& config = {}) {
  ProbabilisticResult out;
  if (largest_extent(cloud) == 0.0) throw DegenerateError("degenerate distances; dataset has duplicate points");
  std::optional<PointCloud> flattened;
  if (config.flatten) {
    RandomSource rng(config.seed);
    out.symmetry = check_rotational_symmetry(cloud, config.symmetry_directions, config.symmetry_threshold, rng,
                                             config.threads);
    if (!out.symmetry->passed)
      throw SymmetryError("cloud is not rotationally symmetric (max K-S " + std::to_string(out.symmetry->max_ks) +
                          " > threshold " + std::to_string(out.symmetry->threshold) +
                          "); flattening needs a symmetric cloud, rerun with flattening waived or fix the data");
    flattened = apply_flattening(cloud, build_flattening(cloud));
    out.flattened = true;
  }
  const PointCloud& work = flattened ? *flattened : cloud;

  auto pairs = nn2_distances(work, config.threads);
  for (std::size_t i = 0; i < pairs.first.size(); ++i)
    if (pairs.first[i] == 0.0 || pairs.first[i] < config.near_duplicate_ratio * pairs.second[i])
      ++out.near_duplicate_count;
  out.near_duplicate_fraction =
      static_cast<double>(out.near_duplicate_count) / static_cast<double>(pairs.first.size());

  const NeighborDistances distances = detail::summarize(std::move(pairs.first));
  out.scan = scan_dimensions(distances, config.n_min, config.n_max, config.moment_tolerance);
  if (!config.flatten) out.scan.warnings.push_back(ScanWarning::flattening_waived);
  if (out.near_duplicate_fraction > config.near_duplicate_alarm)
    out.scan.warnings.push_back(ScanWarning::near_duplicates);
  return out;
}

}  // namespace dimest
