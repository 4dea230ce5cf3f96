#pragma once

#include "fcs/grid.hpp"

namespace fcs::harness {

/// Modified Shepp-Logan head phantom, sampled at pixel centres and scaled to
/// [0, 255]. The phantom's horizontal axis runs along the first index x, so
/// left-right mirroring is x -> N - 1 - x. Requires N >= 16.
RealImage shepp_logan(int n);

/// Total intensity of the continuous phantom over an N x N raster: the sum of
/// every ellipse's area times its intensity, in pixel units.
double shepp_logan_analytic_sum(int n);

/// Image zero-padded to a prime side, remembering the original extent.
template <typename G> struct Padded {
  G image;
  int original = 0;
  /// Rows/columns added before the original content.
  int offset = 0;
};

/// Pads to the smallest prime P >= N: floor((P - N) / 2) zeros before, the
/// rest after. A prime side is returned unchanged.
Padded<RealImage> pad_to_prime(const RealImage &image);
Padded<Image> pad_to_prime(const Image &image);

RealImage crop(const Padded<RealImage> &padded);
RealImage crop(const RealImage &image, int original, int offset);
Image crop(const Image &image, int original, int offset);

} // namespace fcs::harness
