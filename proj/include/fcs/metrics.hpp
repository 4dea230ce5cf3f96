#pragma once

#include <limits>

#include "fcs/grid.hpp"

namespace fcs::metrics {

/// PSNR of identical images.
inline constexpr double kInfinitePsnr = std::numeric_limits<double>::infinity();

struct MetricsReport {
  double psnr = 0.0;
  double ssim = 0.0;
  double rmse = 0.0;
};

double mse(const RealImage &reference, const RealImage &test);
double rmse(const RealImage &reference, const RealImage &test);

/// 10 log10(peak^2 / MSE); kInfinitePsnr when the images are identical.
double psnr(const RealImage &reference, const RealImage &test, double peak = 255.0);

/// Mean local SSIM, 11x11 Gaussian window (sigma 1.5), C1 = (0.01 peak)^2,
/// C2 = (0.03 peak)^2, evaluated where the window fits inside the image.
/// Images smaller than the window use one window covering the whole image.
double ssim(const RealImage &reference, const RealImage &test, double peak = 255.0);

MetricsReport evaluate(const RealImage &reference, const RealImage &test, double peak = 255.0);

/// Scales both images by peak / max(reference) and clips the test image to
/// [0, peak]. Reference all zero leaves the scale at 1.
void normalise_jointly(RealImage &reference, RealImage &test, double peak = 255.0);

} // namespace fcs::metrics
