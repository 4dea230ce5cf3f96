#include "fcs/finite_radon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fcs/fft.hpp"

namespace fcs::radon {

std::string to_token(Slope slope) {
  return std::string(slope.kind == SlopeKind::M ? "m:" : "s:") + std::to_string(slope.value);
}

Slope parse_token(const std::string &token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos || colon == 0)
    throw std::invalid_argument("bad slope token '" + token + "'");
  const std::string kind = token.substr(0, colon);
  Slope slope;
  if (kind == "m" || kind == "M")
    slope.kind = SlopeKind::M;
  else if (kind == "s" || kind == "S")
    slope.kind = SlopeKind::S;
  else
    throw std::invalid_argument("bad slope kind in '" + token + "'");
  std::size_t used = 0;
  const std::string digits = token.substr(colon + 1);
  slope.value = std::stoi(digits, &used);
  if (used != digits.size())
    throw std::invalid_argument("bad slope value in '" + token + "'");
  return slope;
}

void require_prime_power(const GridGeometry &geometry) {
  if (!geometry.is_prime_power())
    throw std::invalid_argument("discrete Radon transform needs N = p^n; N = " +
                                std::to_string(geometry.size()) + " has several prime factors");
}

std::vector<Slope> all_slopes(const GridGeometry &geometry) {
  require_prime_power(geometry);
  std::vector<Slope> slopes;
  slopes.reserve(static_cast<std::size_t>(geometry.slope_count()));
  for (int m = 0; m < geometry.m_slope_count(); ++m)
    slopes.push_back({SlopeKind::M, m});
  for (int s = 0; s < geometry.s_slope_count(); ++s)
    slopes.push_back({SlopeKind::S, s});
  return slopes;
}

void validate_slope(Slope slope, const GridGeometry &geometry) {
  const int limit = slope.kind == SlopeKind::M ? geometry.m_slope_count() : geometry.s_slope_count();
  if (slope.value < 0 || slope.value >= limit)
    throw std::invalid_argument("slope " + to_token(slope) + " out of range for N = " +
                                std::to_string(geometry.size()));
}

Sinogram::Sinogram(GridGeometry geometry, std::vector<Slope> slopes)
    : geometry_(geometry), slopes_(std::move(slopes)),
      data_(slopes_.size() * static_cast<std::size_t>(geometry.size())) {
  require_prime_power(geometry_);
  for (const Slope &s : slopes_)
    validate_slope(s, geometry_);
}

std::span<Complex> Sinogram::row(std::size_t r) {
  const auto n = static_cast<std::size_t>(geometry_.size());
  return std::span<Complex>(data_).subspan(r * n, n);
}

std::span<const Complex> Sinogram::row(std::size_t r) const {
  const auto n = static_cast<std::size_t>(geometry_.size());
  return std::span<const Complex>(data_).subspan(r * n, n);
}

bool Sinogram::is_complete() const {
  if (slopes_.size() != static_cast<std::size_t>(geometry_.slope_count()))
    return false;
  std::vector<Slope> sorted = slopes_;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

Sinogram drt_forward(const Image &image) {
  const auto slopes = all_slopes(image.geometry());
  return drt_forward(image, slopes);
}

Sinogram drt_forward(const Image &image, std::span<const Slope> slopes) {
  const GridGeometry &g = image.geometry();
  Sinogram sino(g, std::vector<Slope>(slopes.begin(), slopes.end()));
  const int n = g.size();
  const int p = g.prime();
  for (std::size_t r = 0; r < sino.row_count(); ++r) {
    const Slope slope = sino.slopes()[r];
    auto out = sino.row(r);
    if (slope.kind == SlopeKind::M) {
      // Walk each image row x; the line through (x, mx + t) shifts by mx.
      for (int x = 0; x < n; ++x) {
        const int shift = g.wrap(static_cast<long long>(slope.value) * x);
        for (int t = 0; t < n; ++t) {
          const int y = shift + t < n ? shift + t : shift + t - n;
          out[t] += image(x, y);
        }
      }
    } else {
      const long long step = static_cast<long long>(p) * slope.value;
      for (int y = 0; y < n; ++y) {
        const int shift = g.wrap(step * y);
        for (int t = 0; t < n; ++t) {
          const int x = shift + t < n ? shift + t : shift + t - n;
          out[t] += image(x, y);
        }
      }
    }
  }
  return sino;
}

std::vector<KPoint> slice_points(Slope slope, const GridGeometry &g) {
  require_prime_power(g);
  validate_slope(slope, g);
  const int n = g.size();
  std::vector<KPoint> pts(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    if (slope.kind == SlopeKind::M)
      pts[k] = {g.wrap(-static_cast<long long>(k) * slope.value), k};
    else
      pts[k] = {k, g.wrap(-static_cast<long long>(k) * g.prime() * slope.value)};
  }
  return pts;
}

CountGrid multiplicity_map(const GridGeometry &geometry, std::span<const Slope> slopes) {
  CountGrid counts(geometry, 0);
  for (const Slope &s : slopes)
    for (const KPoint &pt : slice_points(s, geometry))
      ++counts(pt.u, pt.v);
  return counts;
}

CountGrid multiplicity_map(const GridGeometry &geometry) {
  const auto slopes = all_slopes(geometry);
  return multiplicity_map(geometry, slopes);
}

std::vector<Complex> dfst_slice(std::span<const Complex> projection) {
  return fft::forward_1d(projection);
}

KSpace dfst_place(const Sinogram &sinogram) {
  const GridGeometry &g = sinogram.geometry();
  const CountGrid counts = multiplicity_map(g, sinogram.slopes());
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
  KSpace k(g);
  for (std::size_t r = 0; r < sinogram.row_count(); ++r) {
    const auto slice = dfst_slice(sinogram.row(r));
    const auto pts = slice_points(sinogram.slopes()[r], g);
    for (std::size_t i = 0; i < pts.size(); ++i)
      k(pts[i].u, pts[i].v) += slice[i] * scale;
  }
  for (std::size_t i = 0; i < k.storage().size(); ++i)
    if (counts[i] > 1)
      k[i] /= static_cast<double>(counts[i]);
  return k;
}

Image dfst_backproject(const Sinogram &sinogram) { return fft::inverse_2d(dfst_place(sinogram)); }

Image drt_inverse(const Sinogram &sinogram) {
  if (!sinogram.is_complete())
    throw std::invalid_argument("drt_inverse needs all " +
                                std::to_string(sinogram.geometry().slope_count()) +
                                " slopes exactly once, got " + std::to_string(sinogram.row_count()));
  return dfst_backproject(sinogram);
}

} // namespace fcs::radon
