#pragma once

#include <cstdint>
#include <random>

namespace fcs {

/// Independent random streams, one per purpose, so that e.g. adding noise
/// never perturbs the slope draw of the same seed.
enum class Stream : std::uint64_t {
  SlopeDraw = 1,
  CartesianDraw = 2,
  Noise = 3,
  PsfBasis = 4,
  Ensemble = 5,
  Cell = 6,
};

/// SplitMix64 finaliser (Steele, Lea & Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives a child seed; used for per-sample and per-cell seeds.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ b);
}

/// MT19937-64 engine (bit-exact by the C++ standard) seeded from
/// splitmix64(seed, stream). Distributions are implemented here rather than
/// with <random> distributions, whose output is implementation-defined.
class Rng {
public:
  Rng(std::uint64_t seed, Stream stream)
      : engine_(derive_seed(seed, static_cast<std::uint64_t>(stream))) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold)
        return r % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }

  /// Standard normal via Box-Muller; one value per call.
  double normal();

private:
  std::mt19937_64 engine_;
};

} // namespace fcs
