#include <gtest/gtest.h>

#include "dimest/dimest.hpp"

using namespace dimest;

TEST(CorrelationIntegral, HandCases) {
  const PointCloud two({0, 0, 1, 0}, 2);
  EXPECT_EQ(correlation_integral(two, 2.0), 1.0);
  EXPECT_EQ(correlation_integral(two, 0.5), 0.0);
  EXPECT_EQ(correlation_integral(two, 1.0), 0.0);  // boundary excluded
  const PointCloud three({0, 0, 1, 0, 2, 0}, 2);
  EXPECT_DOUBLE_EQ(correlation_integral(three, 1.5), 2.0 / 3.0);
  EXPECT_THROW(correlation_integral(two, 0.0), ValidationError);
}

TEST(CorrelationIntegral, MatchesPairEnumeration) {
  RandomSource rng(1);
  const auto c = gen_unit_cube(3, 300, rng);
  const std::vector<double> radii{0.9, 0.5, 0.2, 0.1, 0.05};
  const auto counts = count_close_pairs(c, radii);
  for (std::size_t q = 0; q < radii.size(); ++q) {
    std::uint64_t direct = 0;
    for (std::size_t i = 0; i < c.size(); ++i)
      for (std::size_t j = i + 1; j < c.size(); ++j)
        if (std::sqrt(squared_distance(c.row(i), c.row(j))) < radii[q]) ++direct;
    EXPECT_EQ(counts[q], direct) << radii[q];
  }
}

TEST(CorrelationIntegral, MonotoneAndLimits) {
  RandomSource rng(2);
  const auto c = gen_unit_cube(2, 500, rng);
  const auto nd = nn_distances(c);
  EXPECT_EQ(correlation_integral(c, nd.global_min), 0.0);
  EXPECT_EQ(correlation_integral(c, 10.0), 1.0);
  double prev = 0.0;
  for (double r = 0.001; r < 2.0; r *= 1.5) {
    const double rho = correlation_integral(c, r);
    EXPECT_GE(rho, prev);
    const double pairs = rho * 500.0 * 499.0 / 2.0;
    EXPECT_NEAR(pairs, std::round(pairs), 1e-6);
    prev = rho;
  }
}

TEST(CorrelationIntegral, ThreadCountIndependent) {
  RandomSource rng(3);
  const auto c = gen_unit_cube(4, 1500, rng);
  const std::vector<double> radii{0.8, 0.4, 0.2, 0.1};
  const auto one = count_close_pairs(c, radii, 1);
  for (std::size_t t : {2u, 3u, 8u}) EXPECT_EQ(count_close_pairs(c, radii, t), one);
}

TEST(CorrelationDimension, UnitSquare) {
  RandomSource rng(4);
  const auto curve = estimate_correlation_dimension(gen_unit_cube(2, 5000, rng));
  EXPECT_NEAR(curve.dimension, 2.0, 0.2);
  EXPECT_FALSE(curve.subsampled);
  EXPECT_EQ(curve.points_used, 5000u);
  for (std::size_t k = 1; k < curve.entries.size(); ++k) EXPECT_LE(curve.entries[k].rho, curve.entries[k - 1].rho);
}

TEST(CorrelationDimension, SwissRoll) {
  RandomSource rng(5);
  const auto curve = estimate_correlation_dimension(gen_swiss_roll(2000, rng));
  EXPECT_GE(curve.dimension, 1.6);
  EXPECT_LE(curve.dimension, 2.2);
}

TEST(CorrelationDimension, UnderestimatesHighDimension) {
  RandomSource rng(6);
  const auto curve = estimate_correlation_dimension(gen_unit_cube(15, 10000, rng));
  EXPECT_LT(curve.dimension, 12.0);
}

TEST(CorrelationDimension, SubsamplesLargeClouds) {
  RandomSource rng(7);
  const auto cloud = gen_unit_cube(2, 3000, rng);
  CorrelationConfig config;
  config.max_points = 1000;
  config.seed = 9;
  const auto a = estimate_correlation_dimension(cloud, config);
  const auto b = estimate_correlation_dimension(cloud, config);
  EXPECT_TRUE(a.subsampled);
  EXPECT_EQ(a.points_used, 1000u);
  EXPECT_EQ(a.dimension, b.dimension);
}

TEST(CorrelationDimension, RangeBelowSmallestDistance) {
  const PointCloud c({0, 0, 1, 0, 0, 1}, 2);
  CorrelationConfig config;
  config.r_max = 0.5;
  config.r_min = 0.01;
  try {
    estimate_correlation_dimension(c, config);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "r range below smallest pairwise distance");
  }
}

TEST(Subset, OrderPreservingAndSeeded) {
  std::vector<double> v(100);
  for (int i = 0; i < 100; ++i) v[i] = i;
  const PointCloud c(v, 1);
  const auto a = random_subset(c, 10, 3), b = random_subset(c, 10, 3);
  EXPECT_EQ(a, b);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_LT(a(i - 1, 0), a(i, 0));
  EXPECT_EQ(random_subset(c, 100, 3), c);
}
