#include <gtest/gtest.h>

#include <filesystem>
#include <set>
#include <thread>

#include "dimest/dimest.hpp"

using namespace dimest;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dimest_core_" + name)).string();
}

PointCloud random_cloud(std::size_t n, std::size_t m, std::uint64_t seed) {
  RandomSource rng(seed);
  std::vector<double> c(n * m);
  for (double& v : c) v = rng.normal() * 1e3;
  return PointCloud(std::move(c), m);
}

}  // namespace

TEST(PointCloud, RejectsBadShapes) {
  EXPECT_THROW(PointCloud({1.0}, 1), ValidationError);
  EXPECT_THROW(PointCloud({1.0, 2.0, 3.0}, 2), ValidationError);
  EXPECT_THROW(PointCloud({1.0, 2.0}, 0), ValidationError);
  EXPECT_NO_THROW(PointCloud({1.0, 2.0}, 1));
}

TEST(PointCloud, RejectsNonFiniteAndNamesPosition) {
  try {
    PointCloud({0.0, 1.0, std::nan(""), 2.0}, 2);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 1"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 0"), std::string::npos) << msg;
  }
  EXPECT_THROW(PointCloud({0.0, INFINITY}, 1), ValidationError);
}

TEST(Csv, ParsesSimpleBody) {
  const auto c = parse_csv("0.1,0.2\n0.3,0.4");
  ASSERT_EQ(c.size(), 2u);
  ASSERT_EQ(c.ambient_dim(), 2u);
  EXPECT_EQ(c(0, 0), 0.1);
  EXPECT_EQ(c(0, 1), 0.2);
  EXPECT_EQ(c(1, 0), 0.3);
  EXPECT_EQ(c(1, 1), 0.4);
}

TEST(Csv, SinglePointIsRejected) { EXPECT_THROW(parse_csv("1.0\n"), ValidationError); }

TEST(Csv, EmptyIsRejected) { EXPECT_THROW(parse_csv(""), ValidationError); }

TEST(Csv, HeaderAndBlankLines) {
  const auto c = parse_csv("# x,y\n1,2\n\n3,4\n");
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c(1, 1), 4.0);
}

TEST(Csv, RaggedRowNamesLine) {
  try {
    parse_csv("1,2\n3,4\n5\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, GarbageIsParseError) { EXPECT_THROW(parse_csv("1,2\n3,abc\n"), ParseError); }

TEST(Csv, NonFiniteIsValidationError) { EXPECT_THROW(parse_csv("1,2\n3,nan\n"), ValidationError); }

TEST(Csv, FormatsTwoByTwo) {
  const PointCloud c({1.0, 2.0, 3.0, 4.5}, 2);
  const std::string text = format_csv(c);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) EXPECT_EQ(std::count(line.begin(), line.end(), ','), 1);
}

TEST(Csv, RoundTripIsValueExact) {
  const auto c = random_cloud(50, 4, 3);
  EXPECT_EQ(parse_csv(format_csv(c)), c);
}

TEST(Binary, HeaderLayout) {
  const PointCloud c({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, 3);
  const std::string bytes = format_binary(c);
  ASSERT_EQ(bytes.size(), 24u + 6 * 8);
  EXPECT_EQ(bytes.substr(0, 4), "DIMC");
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 1);
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 2);
  EXPECT_EQ(static_cast<unsigned char>(bytes[16]), 3);
}

TEST(Binary, RoundTripBitExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto c = random_cloud(2 + seed * 7, 1 + seed % 5, seed);
    const auto back = parse_binary(format_binary(c));
    ASSERT_EQ(back.size(), c.size());
    ASSERT_EQ(std::memcmp(back.data().data(), c.data().data(), c.data().size_bytes()), 0);
  }
}

TEST(Binary, LargeFileRoundTrip) {
  const auto c = random_cloud(1000, 512, 11);
  const auto path = temp_path("big.dimc");
  save_cloud(c, path, CloudFormat::binary);
  EXPECT_EQ(load_cloud(path, CloudFormat::binary), c);
  std::filesystem::remove(path);
}

TEST(Binary, SmallFileRoundTrip) {
  const auto c = random_cloud(10, 3, 5);
  const auto path = temp_path("small.dimc");
  save_cloud(c, path);
  EXPECT_EQ(load_cloud(path), c);
  std::filesystem::remove(path);
}

TEST(Binary, RejectsCorruptInput) {
  EXPECT_THROW(parse_binary("DIMX"), ParseError);
  std::string bytes = format_binary(PointCloud({1.0, 2.0}, 1));
  EXPECT_THROW(parse_binary(bytes.substr(0, bytes.size() - 1)), ParseError);
  bytes[0] = 'X';
  EXPECT_THROW(parse_binary(bytes), ParseError);
}

TEST(Io, EmptyPathIsIoError) {
  const PointCloud c({1.0, 2.0}, 1);
  EXPECT_THROW(save_cloud(c, "", CloudFormat::csv), IoError);
  EXPECT_THROW(load_cloud("", CloudFormat::csv), IoError);
}

TEST(Io, MissingFileCarriesCause) {
  try {
    load_cloud("/nonexistent/dir/x.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("No such file"), std::string::npos) << e.what();
  }
}

TEST(Io, FormatFromExtension) {
  EXPECT_EQ(format_from_path("a.csv"), CloudFormat::csv);
  EXPECT_EQ(format_from_path("a.dimc"), CloudFormat::binary);
  EXPECT_EQ(format_from_path("a.bin"), CloudFormat::binary);
}

TEST(Projection, KeepsColumnsInOrder) {
  const PointCloud c({1, 2, 3, 4, 5, 6}, 3);
  const auto p = project_axes(c, {{0, 2}, "src"});
  EXPECT_EQ(p, PointCloud({1, 3, 4, 6}, 2));
  EXPECT_EQ(p.label(), "src");
}

TEST(Projection, FullIndexSetIsIdentity) {
  const auto c = random_cloud(20, 6, 1);
  const auto full = AxisProjection::range(0, 6);
  EXPECT_EQ(project_axes(c, full), c);
  const auto once = project_axes(c, {{1, 3, 4}, ""});
  EXPECT_EQ(project_axes(once, AxisProjection::range(0, 3)), once);
}

TEST(Projection, Errors) {
  const PointCloud c({1, 2, 3, 4, 5, 6}, 3);
  EXPECT_THROW(project_axes(c, {{5}, ""}), ValidationError);
  EXPECT_THROW(project_axes(c, {{2, 1}, ""}), ValidationError);
  EXPECT_THROW(project_axes(c, {{1, 1}, ""}), ValidationError);
  EXPECT_THROW(project_axes(c, {{}, ""}), ValidationError);
}

TEST(Subsample, Step) {
  std::vector<double> v(10);
  for (int i = 0; i < 10; ++i) v[i] = i;
  const PointCloud c(v, 1);
  const auto s = subsample(c, 2);
  ASSERT_EQ(s.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(s(i, 0), 2.0 * i);
  EXPECT_EQ(subsample(c, 1), c);
  EXPECT_EQ(subsample(c, 3, 2).size(), 2u);
  EXPECT_THROW(subsample(c, 0), ValidationError);
  EXPECT_THROW(subsample(c, 10), ValidationError);
}

TEST(Subsample, LargeScale) {
  std::vector<double> v(2'000'000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const auto s = subsample(PointCloud(std::move(v), 1), 10, 200000);
  ASSERT_EQ(s.size(), 200000u);
  EXPECT_EQ(s(199999, 0), 1999990.0);
}

TEST(RandomSource, SameSeedSameStream) {
  RandomSource a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
    differs = differs || x != c.uniform();
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(RandomSource::algorithm_id, "mt19937_64");
}

TEST(RandomSource, ForkIsIndependentAndStable) {
  const RandomSource root(7);
  RandomSource f1 = root.fork(1), f1b = root.fork(1), f2 = root.fork(2);
  EXPECT_EQ(f1.seed(), f1b.seed());
  EXPECT_NE(f1.seed(), f2.seed());
}

TEST(Parallel, CoversRangeOnce) {
  for (std::size_t threads : {1u, 2u, 3u, 8u}) {
    std::vector<int> hit(101, 0);
    parallel_for(hit.size(), threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) ++hit[i];
    });
    for (int h : hit) EXPECT_EQ(h, 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(10, 4, [](std::size_t, std::size_t) { throw ValidationError("x"); }), ValidationError);
}

TEST(Parallel, ZeroMeansHardware) { EXPECT_GE(resolve_threads(0), 1u); }
