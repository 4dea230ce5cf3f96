#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

#include "fcs/grid.hpp"
#include "fcs/random.hpp"

namespace testing {

inline fcs::Image random_image(int n, std::uint64_t seed, bool complex_values = true) {
  fcs::Rng rng(seed, fcs::Stream::Noise);
  fcs::Image img{fcs::GridGeometry(n)};
  for (auto &v : img.storage())
    v = {rng.uniform() - 0.5, complex_values ? rng.uniform() - 0.5 : 0.0};
  return img;
}

inline fcs::RealImage random_real(int n, std::uint64_t seed, double scale = 255.0) {
  fcs::Rng rng(seed, fcs::Stream::Noise);
  fcs::RealImage img{fcs::GridGeometry(n)};
  for (auto &v : img.storage())
    v = scale * rng.uniform();
  return img;
}

/// Unitary 2D DFT coefficient at (u, v) by direct summation.
inline fcs::Complex direct_dft(const fcs::Image &img, int u, int v) {
  const int n = img.size();
  fcs::Complex acc = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const double phase = -2.0 * std::numbers::pi * (static_cast<double>(u) * x + static_cast<double>(v) * y) / n;
      acc += img(x, y) * std::polar(1.0, phase);
    }
  return acc / static_cast<double>(n);
}

template <typename A, typename B> double max_abs_diff(const A &a, const B &b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.storage().size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

} // namespace testing
