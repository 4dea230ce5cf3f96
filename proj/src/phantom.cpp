#include "fcs/phantom.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace fcs::harness {
namespace {

struct Ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// Toft's modified intensities, which keep the interior features visible.
constexpr std::array<Ellipse, 10> kEllipses{{
    {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
    {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
    {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
    {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
    {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
    {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
    {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
    {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
    {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
}};

constexpr double kScale = 255.0;

template <typename G> Padded<G> pad(const G &image) {
  const int n = image.size();
  const int p = next_prime(n);
  if (p == n)
    return {image, n, 0};
  const int offset = (p - n) / 2;
  G out{GridGeometry(p)};
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      out(x + offset, y + offset) = image(x, y);
  return {std::move(out), n, offset};
}

template <typename G> G crop_impl(const G &image, int original, int offset) {
  if (original < 1 || offset < 0 || offset + original > image.size())
    throw std::invalid_argument("crop extent " + std::to_string(original) + " at offset " + std::to_string(offset) +
                                " does not fit in " + std::to_string(image.size()));
  G out{GridGeometry(original)};
  for (int x = 0; x < original; ++x)
    for (int y = 0; y < original; ++y)
      out(x, y) = image(x + offset, y + offset);
  return out;
}

} // namespace

RealImage shepp_logan(int n) {
  if (n < 16)
    throw std::invalid_argument("Shepp-Logan phantom needs N >= 16, got " + std::to_string(n));
  RealImage out{GridGeometry(n)};
  for (const Ellipse &e : kEllipses) {
    const double phi = e.phi_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi), s = std::sin(phi);
    for (int x = 0; x < n; ++x) {
      const double u = (2.0 * x + 1.0) / n - 1.0 - e.x0;
      for (int y = 0; y < n; ++y) {
        const double v = (2.0 * y + 1.0) / n - 1.0 - e.y0;
        const double p = (u * c + v * s) / e.a;
        const double q = (-u * s + v * c) / e.b;
        if (p * p + q * q <= 1.0)
          out(x, y) += e.intensity;
      }
    }
  }
  for (auto &v : out.storage())
    v = std::max(0.0, v) * kScale;
  return out;
}

double shepp_logan_analytic_sum(int n) {
  // One unit of phantom coordinates spans n / 2 pixels.
  const double pixels_per_unit_area = 0.25 * n * n;
  double acc = 0.0;
  for (const Ellipse &e : kEllipses)
    acc += e.intensity * std::numbers::pi * e.a * e.b;
  return acc * pixels_per_unit_area * kScale;
}

Padded<RealImage> pad_to_prime(const RealImage &image) { return pad(image); }
Padded<Image> pad_to_prime(const Image &image) { return pad(image); }

RealImage crop(const Padded<RealImage> &padded) { return crop_impl(padded.image, padded.original, padded.offset); }
RealImage crop(const RealImage &image, int original, int offset) { return crop_impl(image, original, offset); }
Image crop(const Image &image, int original, int offset) { return crop_impl(image, original, offset); }

} // namespace fcs::harness
