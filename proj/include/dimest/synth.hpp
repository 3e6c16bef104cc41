#pragma once

// Synthetic clouds: Swiss roll, linearly embedded cubes, unit cubes and spheres.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "dimest/error.hpp"
#include "dimest/point_cloud.hpp"
#include "dimest/random.hpp"

namespace dimest {

enum class GeneratorKind { swiss_roll, linear_embed, unit_cube, sphere_surface };

inline std::string_view to_string(GeneratorKind k) {
  switch (k) {
    case GeneratorKind::swiss_roll: return "swiss_roll";
    case GeneratorKind::linear_embed: return "linear_embed";
    case GeneratorKind::unit_cube: return "unit_cube";
    case GeneratorKind::sphere_surface: return "sphere_surface";
  }
  return "";
}

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::unit_cube;
  std::size_t intrinsic_dim = 2;
  std::size_t ambient_dim = 2;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
  bool identity_embedding = false;  ///< linear_embed with d = D and Q = I

  /// Throws ValidationError when the spec is inconsistent.
  void validate() const {
    if (n_samples < 2) throw ValidationError("n_samples must be >= 2");
    if (intrinsic_dim < 1) throw ValidationError("intrinsic dimension must be >= 1");
    if (intrinsic_dim > ambient_dim) throw ValidationError("intrinsic dimension exceeds ambient dimension");
    switch (kind) {
      case GeneratorKind::swiss_roll:
        if (intrinsic_dim != 2 || ambient_dim != 3) throw ValidationError("swiss roll requires d=2, D=3");
        break;
      case GeneratorKind::unit_cube:
        if (intrinsic_dim != ambient_dim) throw ValidationError("unit cube requires d = D");
        break;
      case GeneratorKind::sphere_surface:
        if (ambient_dim < 2 || intrinsic_dim + 1 != ambient_dim)
          throw ValidationError("sphere surface requires D >= 2 and d = D - 1");
        break;
      case GeneratorKind::linear_embed:
        if (identity_embedding && intrinsic_dim != ambient_dim)
          throw ValidationError("identity embedding requires d = D");
        break;
    }
  }

  std::string label() const {
    return std::string(to_string(kind)) + "_d" + std::to_string(intrinsic_dim) + "_D" + std::to_string(ambient_dim) +
           "_n" + std::to_string(n_samples) + "_s" + std::to_string(seed);
  }
};

/// (x cos 2πy, y, x sin 2πy).
inline std::array<double, 3> swiss_roll_point(double x, double y) {
  const double angle = 2.0 * std::numbers::pi * y;
  return {x * std::cos(angle), y, x * std::sin(angle)};
}

/// (x, y) uniform on [0,1]^2 mapped onto the roll.
inline PointCloud gen_swiss_roll(std::size_t n, RandomSource& rng) {
  if (n < 2) throw ValidationError("n must be >= 2");
  std::vector<double> coords;
  coords.reserve(3 * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    const auto p = swiss_roll_point(x, y);
    coords.insert(coords.end(), p.begin(), p.end());
  }
  return PointCloud(std::move(coords), 3, "swiss_roll");
}

/// D x d matrix (row-major) with orthonormal columns: Gram-Schmidt, applied
/// twice, on a Gaussian matrix.
inline std::vector<double> random_orthonormal_columns(std::size_t rows, std::size_t cols, RandomSource& rng) {
  if (cols > rows) throw ValidationError("cannot fit more orthonormal columns than rows");
  std::vector<double> q(rows * cols);
  for (double& v : q) v = rng.normal();
  auto at = [&](std::size_t i, std::size_t j) -> double& { return q[i * cols + j]; };
  for (std::size_t j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < j; ++k) {
        double dot = 0.0;
        for (std::size_t i = 0; i < rows; ++i) dot += at(i, k) * at(i, j);
        for (std::size_t i = 0; i < rows; ++i) at(i, j) -= dot * at(i, k);
      }
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < rows; ++i) norm += at(i, j) * at(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw Error("Gram-Schmidt breakdown");
    for (std::size_t i = 0; i < rows; ++i) at(i, j) /= norm;
  }
  return q;
}

/// u uniform in [0,1]^d mapped to Q u in R^D. Q is drawn first, then the points.
inline PointCloud gen_linear_embed(std::size_t d, std::size_t ambient, std::size_t n, RandomSource& rng,
                                   bool identity = false) {
  if (d < 1 || d > ambient) throw ValidationError("linear embedding needs 1 <= d <= D");
  if (n < 2) throw ValidationError("n must be >= 2");
  if (identity && d != ambient) throw ValidationError("identity embedding requires d = D");
  std::vector<double> q;
  if (identity) {
    q.assign(ambient * d, 0.0);
    for (std::size_t j = 0; j < d; ++j) q[j * d + j] = 1.0;
  } else {
    q = random_orthonormal_columns(ambient, d, rng);
  }
  std::vector<double> coords(n * ambient, 0.0);
  std::vector<double> u(d);
  for (std::size_t p = 0; p < n; ++p) {
    for (double& v : u) v = rng.uniform();
    double* out = coords.data() + p * ambient;
    if (identity) {
      std::copy(u.begin(), u.end(), out);
      continue;
    }
    for (std::size_t i = 0; i < ambient; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += q[i * d + j] * u[j];
      out[i] = s;
    }
  }
  return PointCloud(std::move(coords), ambient, "linear_embed");
}

inline PointCloud gen_unit_cube(std::size_t d, std::size_t n, RandomSource& rng) {
  if (d < 1) throw ValidationError("d must be >= 1");
  if (n < 2) throw ValidationError("n must be >= 2");
  std::vector<double> coords(n * d);
  for (double& v : coords) v = rng.uniform();
  return PointCloud(std::move(coords), d, "unit_cube");
}

/// Uniform on S^{D-1}: normalised Gaussian vectors.
inline PointCloud gen_sphere_surface(std::size_t ambient, std::size_t n, RandomSource& rng) {
  if (ambient < 2) throw ValidationError("sphere needs D >= 2");
  if (n < 2) throw ValidationError("n must be >= 2");
  std::vector<double> coords(n * ambient);
  for (std::size_t p = 0; p < n; ++p) {
    double* x = coords.data() + p * ambient;
    double norm = 0.0;
    do {
      norm = 0.0;
      for (std::size_t j = 0; j < ambient; ++j) {
        x[j] = rng.normal();
        norm += x[j] * x[j];
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < ambient; ++j) x[j] /= norm;
  }
  return PointCloud(std::move(coords), ambient, "sphere_surface");
}

inline PointCloud generate(const GeneratorSpec& spec) {
  spec.validate();
  RandomSource rng(spec.seed);
  switch (spec.kind) {
    case GeneratorKind::swiss_roll: return gen_swiss_roll(spec.n_samples, rng).with_label(spec.label());
    case GeneratorKind::linear_embed:
      return gen_linear_embed(spec.intrinsic_dim, spec.ambient_dim, spec.n_samples, rng, spec.identity_embedding)
          .with_label(spec.label());
    case GeneratorKind::unit_cube: return gen_unit_cube(spec.ambient_dim, spec.n_samples, rng).with_label(spec.label());
    case GeneratorKind::sphere_surface:
      return gen_sphere_surface(spec.ambient_dim, spec.n_samples, rng).with_label(spec.label());
  }
  throw ValidationError("unknown generator kind");
}

}  // namespace dimest
