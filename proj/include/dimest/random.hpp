#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace dimest {

/// Seeded pseudo-random stream. Every stochastic operation takes one explicitly;
/// there is no global generator.
class RandomSource {
 public:
  static constexpr std::string_view algorithm_id = "mt19937_64";

  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform draw in [0, 1).
  double uniform() {
    // generate_canonical may round up to 1.0 on some standard libraries.
    const double u = uniform_(engine_);
    return u < 1.0 ? u : std::nextafter(1.0, 0.0);
  }

  /// Standard normal draw.
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() noexcept { return engine_; }

  /// Independent child stream keyed by `stream`; the parent is not advanced.
  RandomSource fork(std::uint64_t stream) const {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::uint64_t child = 0;
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    child = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    return RandomSource(child);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace dimest
