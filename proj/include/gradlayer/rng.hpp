#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace gradlayer {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Purposes for deriving independent sub-streams from one master seed.
/// Each consumer of randomness in a run owns exactly one stream, so any
/// single stage (dataset, init, batch draws, ...) replays on its own.
enum class Stream : std::uint64_t {
  dataset = 1,
  critic_init = 2,
  generator_init = 3,
  real_batch = 4,
  base_batch = 5,
  epsilon = 6,
  metrics = 7,
  generation = 8,
  particles = 9,
};

inline std::uint64_t substream_seed(std::uint64_t master, Stream purpose) {
  return splitmix64(master ^ (0x5851f42d4c957f2dull * static_cast<std::uint64_t>(purpose)));
}

/// Deterministic generator with hand-rolled uniform/normal draws so output
/// does not depend on the standard library's distribution implementations.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : engine_(seed) {}

  Prng(std::uint64_t master, Stream purpose) : engine_(substream_seed(master, purpose)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (no cached spare; two uniforms per draw).
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    return r * std::cos(2.0 * M_PI * u2);
  }

  /// Uniform index in [0, n). Modulo bias is negligible for the n used here.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gradlayer
