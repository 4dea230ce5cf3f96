#include "fcs/nlm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fcs::recon {
namespace {

int mirror(int i, int n) {
  if (n == 1)
    return 0;
  const int period = 2 * (n - 1);
  i %= period;
  if (i < 0)
    i += period;
  return i < n ? i : period - i;
}

} // namespace

void NlmParams::validate() const {
  if (!(h >= 0.0))
    throw std::invalid_argument("NLM strength h must be >= 0");
  if (patch_radius < 1 || search_radius < 1)
    throw std::invalid_argument("NLM radii must be >= 1");
  if (search_radius < patch_radius)
    throw std::invalid_argument("NLM search radius must be >= patch radius");
}

RealImage nlm_denoise(const RealImage &image, const NlmParams &params) {
  params.validate();
  if (params.h == 0.0)
    return image;

  const int n = image.size();
  const int pr = params.patch_radius;
  const int sr = params.search_radius;
  const int pad = pr + sr;
  const int wide = n + 2 * pad;
  std::vector<double> padded(static_cast<std::size_t>(wide) * wide);
  for (int x = 0; x < wide; ++x)
    for (int y = 0; y < wide; ++y)
      padded[static_cast<std::size_t>(x) * wide + y] = image(mirror(x - pad, n), mirror(y - pad, n));
  auto at = [&](int x, int y) { return padded[static_cast<std::size_t>(x + pad) * wide + (y + pad)]; };

  // Squared differences live on the output grid grown by the patch radius.
  const int span = n + 2 * pr;
  const double inv = 1.0 / (static_cast<double>((2 * pr + 1) * (2 * pr + 1)) * params.h * params.h);
  std::vector<double> diff(static_cast<std::size_t>(span) * span);
  std::vector<double> rows(static_cast<std::size_t>(n) * span);
  std::vector<double> num(image.geometry().pixel_count(), 0.0);
  std::vector<double> den(image.geometry().pixel_count(), 0.0);

  for (int dx = -sr; dx <= sr; ++dx) {
    for (int dy = -sr; dy <= sr; ++dy) {
      for (int x = 0; x < span; ++x)
        for (int y = 0; y < span; ++y) {
          const double d = at(x - pr, y - pr) - at(x - pr + dx, y - pr + dy);
          diff[static_cast<std::size_t>(x) * span + y] = d * d;
        }
      // Box sum along x, then along y.
      for (int y = 0; y < span; ++y) {
        double acc = 0.0;
        for (int k = 0; k < 2 * pr + 1; ++k)
          acc += diff[static_cast<std::size_t>(k) * span + y];
        rows[static_cast<std::size_t>(y)] = acc;
        for (int x = 1; x < n; ++x) {
          acc += diff[static_cast<std::size_t>(x + 2 * pr) * span + y] -
                 diff[static_cast<std::size_t>(x - 1) * span + y];
          rows[static_cast<std::size_t>(x) * span + y] = acc;
        }
      }
      for (int x = 0; x < n; ++x) {
        const double *row = &rows[static_cast<std::size_t>(x) * span];
        double acc = 0.0;
        for (int k = 0; k < 2 * pr + 1; ++k)
          acc += row[k];
        for (int y = 0; y < n; ++y) {
          if (y > 0)
            acc += row[y + 2 * pr] - row[y - 1];
          const double w = std::exp(-std::max(acc, 0.0) * inv);
          const std::size_t i = static_cast<std::size_t>(x) * n + y;
          num[i] += w * at(x + dx, y + dy);
          den[i] += w;
        }
      }
    }
  }

  RealImage out(image.geometry());
  for (std::size_t i = 0; i < num.size(); ++i)
    out[i] = num[i] / den[i];
  return out;
}

Image nlm_denoise(const Image &image, const NlmParams &params) {
  params.validate();
  if (params.h == 0.0)
    return image;
  RealImage re(image.geometry()), im(image.geometry());
  bool has_imag = false;
  for (std::size_t i = 0; i < image.storage().size(); ++i) {
    re[i] = image[i].real();
    im[i] = image[i].imag();
    has_imag = has_imag || im[i] != 0.0;
  }
  const RealImage re_out = nlm_denoise(re, params);
  // An all-zero channel is a fixed point of the filter.
  const RealImage im_out = has_imag ? nlm_denoise(im, params) : im;
  Image out(image.geometry());
  for (std::size_t i = 0; i < out.storage().size(); ++i)
    out[i] = Complex(re_out[i], im_out[i]);
  return out;
}

} // namespace fcs::recon
