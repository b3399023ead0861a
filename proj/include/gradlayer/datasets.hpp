#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gradlayer/errors.hpp"
#include "gradlayer/measure.hpp"
#include "gradlayer/rng.hpp"

namespace gradlayer {

/// 2-D spiral: t ~ U[1.5pi, 4.5pi], point = (t cos t, t sin t)/(4.5pi) plus
/// Gaussian noise (std 0.01), then uniformly shrunk if any coordinate leaves
/// [-1,1]. Deterministic per seed.
inline EmpiricalMeasure swiss_roll(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw ShapeError("swiss_roll: n must be >= 1");
  Prng rng(seed, Stream::dataset);
  EmpiricalMeasure m(2);
  m.data.reserve(2 * n);
  const double t_lo = 1.5 * M_PI, t_hi = 4.5 * M_PI;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = rng.uniform(t_lo, t_hi);
    const double x = t * std::cos(t) / t_hi + 0.01 * rng.normal();
    const double y = t * std::sin(t) / t_hi + 0.01 * rng.normal();
    m.data.push_back(x);
    m.data.push_back(y);
  }
  double peak = 1.0;
  for (double v : m.data) peak = std::max(peak, std::abs(v));
  for (double& v : m.data) v /= peak;
  return m;
}

/// Mixture with uniformly chosen components and isotropic Gaussian noise.
inline EmpiricalMeasure gaussian_mixture(std::span<const std::vector<double>> centers, double stddev,
                                         std::size_t n, std::uint64_t seed) {
  if (centers.empty()) throw ShapeError("gaussian_mixture: centers must be nonempty");
  if (stddev < 0.0) throw ShapeError("gaussian_mixture: std must be >= 0");
  if (n == 0) throw ShapeError("gaussian_mixture: n must be >= 1");
  const int dim = static_cast<int>(centers.front().size());
  for (const auto& c : centers) {
    if (static_cast<int>(c.size()) != dim) throw ShapeError("gaussian_mixture: center dim mismatch");
  }
  Prng rng(seed, Stream::dataset);
  EmpiricalMeasure m(dim);
  m.data.reserve(static_cast<std::size_t>(dim) * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = centers[rng.below(centers.size())];
    for (int j = 0; j < dim; ++j) m.data.push_back(c[j] + stddev * rng.normal());
  }
  return m;
}

/// Isotropic Gaussian noise centered at the origin.
inline EmpiricalMeasure gaussian_noise(int dim, double stddev, std::size_t n, std::uint64_t seed) {
  if (dim <= 0) throw ShapeError("gaussian_noise: dim must be positive");
  if (stddev < 0.0) throw ShapeError("gaussian_noise: std must be >= 0");
  if (n == 0) throw ShapeError("gaussian_noise: n must be >= 1");
  Prng rng(seed, Stream::dataset);
  EmpiricalMeasure m(dim);
  m.data.reserve(static_cast<std::size_t>(dim) * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) m.data.push_back(stddev * rng.normal());
  }
  return m;
}

/// A toy dataset together with its effective mixture geometry (post-rescale),
/// which mode-coverage checks measure against.
struct ToyDataset {
  EmpiricalMeasure points;
  std::vector<std::array<double, 2>> centers;
  double component_std = 0.0;
};

namespace detail {

// Mixture layouts are drawn at their natural scale and then divided by a
// fixed factor so the layout sits inside [-1,1]^2; the factor also rescales
// the reported centers and component std.
constexpr double kToyRescale = 2.1;

}  // namespace detail

/// 8 modes equally spaced on a circle of radius 2, component std 0.02,
/// divided by 2.1 to fit [-1,1]^2.
inline ToyDataset eight_gaussians(std::size_t n, std::uint64_t seed) {
  std::vector<std::vector<double>> centers;
  for (int k = 0; k < 8; ++k) {
    const double a = 2.0 * M_PI * k / 8.0;
    centers.push_back({2.0 * std::cos(a), 2.0 * std::sin(a)});
  }
  ToyDataset toy;
  toy.points = gaussian_mixture(centers, 0.02, n, seed);
  for (double& v : toy.points.data) v /= detail::kToyRescale;
  for (const auto& c : centers) {
    toy.centers.push_back({c[0] / detail::kToyRescale, c[1] / detail::kToyRescale});
  }
  toy.component_std = 0.02 / detail::kToyRescale;
  return toy;
}

/// 5x5 grid of modes on [-2,2]^2, component std 0.05, same rescale.
inline ToyDataset twenty_five_gaussians(std::size_t n, std::uint64_t seed) {
  std::vector<std::vector<double>> centers;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      centers.push_back({-2.0 + i * 1.0, -2.0 + j * 1.0});
    }
  }
  ToyDataset toy;
  toy.points = gaussian_mixture(centers, 0.05, n, seed);
  for (double& v : toy.points.data) v /= detail::kToyRescale;
  for (const auto& c : centers) {
    toy.centers.push_back({c[0] / detail::kToyRescale, c[1] / detail::kToyRescale});
  }
  toy.component_std = 0.05 / detail::kToyRescale;
  return toy;
}

}  // namespace gradlayer
