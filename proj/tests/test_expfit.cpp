#include <gtest/gtest.h>

#include <numbers>

#include "dimest/dimest.hpp"

using namespace dimest;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(BallVolume, ClosedForms) {
  EXPECT_LT(rel(ball_volume(1, 1.0), 2.0), 1e-12);
  EXPECT_LT(rel(ball_volume(2, 1.0), std::numbers::pi), 1e-12);
  EXPECT_LT(rel(ball_volume(3, 0.5), 4.0 / 3.0 * std::numbers::pi * 0.125), 1e-12);
  EXPECT_NEAR(ball_volume(3, 0.5), 0.52359878, 1e-8);
  for (double t : {1e-3, 0.1, 0.7, 2.0, 10.0}) {
    EXPECT_LT(rel(ball_volume(1, t), 2.0 * t), 1e-12);
    EXPECT_LT(rel(ball_volume(2, t), std::numbers::pi * t * t), 1e-12);
    EXPECT_LT(rel(ball_volume(3, t), 4.0 / 3.0 * std::numbers::pi * t * t * t), 1e-12);
  }
  EXPECT_EQ(ball_volume(5, 0.0), 0.0);
}

TEST(BallVolume, MatchesDirectEvaluation) {
  for (unsigned n = 1; n <= 20; ++n)
    for (double t : {1e-3, 0.05, 0.5, 1.0, 3.0, 10.0}) {
      const double direct = std::pow(std::numbers::pi, n / 2.0) * std::pow(t, n) / std::tgamma(n / 2.0 + 1.0);
      EXPECT_LT(rel(ball_volume(n, t), direct), 1e-12) << n << " " << t;
    }
}

TEST(BallVolume, IncreasingInRadius) {
  for (unsigned n : {1u, 4u, 17u})
    for (double t = 0.01; t < 5.0; t *= 1.3) EXPECT_LT(ball_volume(n, t), ball_volume(n, t * 1.01));
}

TEST(BallVolume, ExtremeStaysFinite) {
  const double v = ball_volume(512, 1e-6);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_GE(v, 0.0);
  EXPECT_TRUE(std::isfinite(log_ball_volume(512, 1e-6)));
  EXPECT_LT(log_ball_volume(512, 1e-6), -7000.0);
}

TEST(BallVolume, Preconditions) {
  EXPECT_THROW(ball_volume(0, 1.0), ValidationError);
  EXPECT_THROW(ball_volume(2, -1.0), ValidationError);
}

TEST(KsExponential, TwoEqualSamples) {
  const auto r = ks_exponential(std::vector<double>{2.5, 2.5});
  EXPECT_DOUBLE_EQ(r.lambda, 1.0 / 2.5);
  // F = 1 - e^-1 at both order statistics: max(1/2 - F, F - 0, 1 - F, F - 1/2) = F
  EXPECT_DOUBLE_EQ(r.ks, 1.0 - std::exp(-1.0));
}

TEST(KsExponential, Errors) {
  EXPECT_THROW(ks_exponential(std::vector<double>{0.0, 0.0, 0.0}), DegenerateError);
  try {
    ks_exponential(std::vector<double>{0.0, 0.0});
  } catch (const DegenerateError& e) {
    EXPECT_STREQ(e.what(), "degenerate distances; dataset has duplicate points");
  }
  EXPECT_THROW(ks_exponential(std::vector<double>{1.0}), ValidationError);
  EXPECT_THROW(ks_exponential(std::vector<double>{-1.0, 1.0}), ValidationError);
}

TEST(KsExponential, ExponentialDraws) {
  RandomSource rng(1);
  std::exponential_distribution<double> exp1(1.0);
  std::vector<double> s(100000);
  for (double& v : s) v = exp1(rng.engine());
  const auto r = ks_exponential(s);
  EXPECT_LT(r.ks, 0.006);
  EXPECT_NEAR(r.lambda, 1.0, 0.02);
}

TEST(KsExponential, UniformDrawsRejected) {
  RandomSource rng(2);
  std::vector<double> s(100000);
  for (double& v : s) v = rng.uniform();
  EXPECT_GT(ks_exponential(s).ks, 0.05);
}

TEST(KsExponential, StratifiedSample) {
  for (std::size_t n : {10u, 100u, 1000u, 10000u}) {
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = -std::log1p(-(k + 0.5) / static_cast<double>(n));
    // with the rate known exactly the statistic is 1/(2N)
    const double known = ks_statistic(s, [](double x) { return -std::expm1(-x); });
    EXPECT_NEAR(known, 0.5 / n, 1e-12);
    // refitting the rate shifts it by at most a fraction of 1/N
    const auto fitted = ks_exponential(s);
    EXPECT_NEAR(fitted.ks, 0.5 / n, 0.2 / n + 1e-12) << n;
  }
}

TEST(KsExponential, Bounds) {
  RandomSource rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> s(2 + rep * 5);
    for (double& v : s) v = rng.uniform() * rep;
    if (rep == 0) s = {0.0, 1.0};
    const double d = ks_exponential(s).ks;
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 1.0);
  }
}

TEST(Select, MomentMatchPreferred) {
  DimensionScanResult r;
  r.moment_tolerance = 0.2;
  r.candidates = {{1, 0, 0, 0, 3.0, 0.01, 0}, {2, 0, 0, 0, 1.1, 0.05, 0}, {3, 0, 0, 0, 0.9, 0.03, 0}};
  select_dimension(r);
  EXPECT_EQ(r.selected_n, 3u);
  EXPECT_EQ(r.confidence, Confidence::high);
  EXPECT_FALSE(r.has_warning(ScanWarning::no_moment_match));
}

TEST(Select, FallbackToKsArgmin) {
  DimensionScanResult r;
  r.moment_tolerance = 0.2;
  r.candidates = {{1, 0, 0, 0, 3.0, 0.04, 0}, {2, 0, 0, 0, 2.0, 0.01, 0}, {3, 0, 0, 0, 0.5, 0.03, 0}};
  select_dimension(r);
  EXPECT_EQ(r.selected_n, 2u);
  EXPECT_EQ(r.confidence, Confidence::low);
  EXPECT_TRUE(r.has_warning(ScanWarning::no_moment_match));
}

TEST(Scan, PoissonSquare) {
  RandomSource rng(4);
  const auto c = gen_unit_cube(2, 10000, rng);
  const auto scan = scan_dimensions(nn_distances(c), 1, 6);
  EXPECT_EQ(scan.selected_n, 2u);
  EXPECT_EQ(scan.candidates.size(), 6u);
  for (const auto& cand : scan.candidates) {
    EXPECT_GE(cand.a2, 0.0);
    EXPECT_GE(cand.ks, 0.0);
    EXPECT_LE(cand.ks, 1.0);
    EXPECT_GT(cand.lambda_hat, 0.0);
    EXPECT_NEAR(cand.a1_squared, cand.a1 * cand.a1, 1e-12 * cand.a1_squared);
  }
}

TEST(Scan, MatchesDirectMoments) {
  RandomSource rng(5);
  const auto nd = nn_distances(gen_unit_cube(3, 2000, rng));
  const auto scan = scan_dimensions(nd, 1, 5);
  for (const auto& cand : scan.candidates) {
    std::vector<double> s;
    for (double d : nd.d_min) s.push_back(ball_volume(cand.n, d));
    double mean = 0.0;
    for (double v : s) mean += v;
    mean /= s.size();
    double var = 0.0;
    for (double v : s) var += (v - mean) * (v - mean);
    var /= s.size() - 1.0;
    EXPECT_LT(rel(cand.a1, mean), 1e-10);
    EXPECT_LT(rel(cand.a2, var), 1e-9);
    EXPECT_NEAR(cand.ks, ks_exponential(s).ks, 1e-12);
  }
}

TEST(Scan, ScaleInvariantSelection) {
  RandomSource rng(6);
  const auto nd = nn_distances(gen_unit_cube(3, 5000, rng));
  NeighborDistances scaled = nd;
  for (double& d : scaled.d_min) d *= 123.4;
  const auto a = scan_dimensions(nd, 1, 10), b = scan_dimensions(scaled, 1, 10);
  EXPECT_EQ(a.selected_n, b.selected_n);
  for (std::size_t k = 0; k < a.candidates.size(); ++k) {
    EXPECT_NEAR(a.candidates[k].moment_ratio, b.candidates[k].moment_ratio, 1e-9);
    EXPECT_NEAR(a.candidates[k].ks, b.candidates[k].ks, 1e-9);
  }
}

TEST(Scan, HighDimensionCandidatesStayFinite) {
  RandomSource rng(7);
  const auto nd = nn_distances(gen_unit_cube(2, 500, rng));
  const auto scan = scan_dimensions(nd, 1, 64);
  for (const auto& cand : scan.candidates) {
    EXPECT_TRUE(std::isfinite(cand.moment_ratio));
    EXPECT_TRUE(std::isfinite(cand.ks));
  }
}

TEST(Scan, ZeroFractionWarning) {
  NeighborDistances nd;
  nd.d_min = {0.0, 0.0, 0.1, 0.2, 0.3, 0.15, 0.25, 0.05};
  nd.global_min = 0.0;
  nd.zero_fraction = 0.25;
  const auto scan = scan_dimensions(nd, 1, 3);
  EXPECT_TRUE(scan.has_warning(ScanWarning::high_zero_fraction));
}

TEST(Scan, Errors) {
  NeighborDistances nd;
  nd.d_min = {0.0, 0.0};
  EXPECT_THROW(scan_dimensions(nd, 1, 3), DegenerateError);
  nd.d_min = {1.0, 2.0};
  EXPECT_THROW(scan_dimensions(nd, 0, 3), ValidationError);
  EXPECT_THROW(scan_dimensions(nd, 4, 3), ValidationError);
  EXPECT_THROW(scan_dimensions(nd, 1, 3, 0.0), ValidationError);
}

TEST(Pipeline, SwissRollWithoutFlattening) {
  RandomSource rng(8);
  ProbabilisticConfig config;
  config.flatten = false;
  config.n_max = 10;
  const auto r = estimate_probabilistic(gen_swiss_roll(2000, rng), config);
  EXPECT_EQ(r.scan.selected_n, 2u);
  EXPECT_TRUE(r.scan.has_warning(ScanWarning::flattening_waived));
  EXPECT_FALSE(r.flattened);
  EXPECT_FALSE(r.symmetry.has_value());
}

TEST(Pipeline, AsymmetricCloudRefusesToFlatten) {
  RandomSource rng(9);
  EXPECT_THROW(estimate_probabilistic(gen_swiss_roll(2000, rng)), SymmetryError);
}

TEST(Pipeline, SymmetricCloudIsFlattened) {
  RandomSource rng(10);
  ProbabilisticConfig config;
  config.symmetry_directions = 100;
  config.n_max = 12;
  const auto r = estimate_probabilistic(gen_sphere_surface(3, 5000, rng), config);
  ASSERT_TRUE(r.symmetry.has_value());
  EXPECT_TRUE(r.symmetry->passed);
  EXPECT_TRUE(r.flattened);
  EXPECT_FALSE(r.scan.has_warning(ScanWarning::flattening_waived));
  ASSERT_TRUE(r.scan.selected_n.has_value());
}

TEST(Pipeline, DuplicatePointsAreDegenerate) {
  EXPECT_THROW(estimate_probabilistic(PointCloud({1.0, 2.0, 1.0, 2.0}, 2)), DegenerateError);
}

TEST(Pipeline, NearDuplicatesWarn) {
  RandomSource rng(11);
  const auto base = gen_unit_cube(3, 2000, rng);
  std::vector<double> coords(base.data().begin(), base.data().end());
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = 0; j < 3; ++j) coords.push_back(base(i, j) + (rng.uniform() * 2.0 - 1.0) * 1e-6);
  ProbabilisticConfig config;
  config.flatten = false;
  config.n_max = 8;
  const auto r = estimate_probabilistic(PointCloud(std::move(coords), 3), config);
  EXPECT_TRUE(r.scan.has_warning(ScanWarning::near_duplicates));
  EXPECT_GT(r.near_duplicate_fraction, 0.9);
}
