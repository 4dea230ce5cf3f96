#pragma once

#include "fcs/grid.hpp"

namespace fcs::recon {

struct NlmParams {
  /// Filtering strength; 0 disables the filter.
  double h = 0.0;
  int patch_radius = 1;
  int search_radius = 5;

  void validate() const;
};

/// Non-local means. Each output pixel is the weighted average of the pixels in
/// its (2 search_radius + 1)^2 window, weight exp(-d^2 / h^2) with d^2 the
/// mean squared difference of the (2 patch_radius + 1)^2 patches. Borders are
/// mirrored.
RealImage nlm_denoise(const RealImage &image, const NlmParams &params);

/// Real and imaginary parts filtered independently.
Image nlm_denoise(const Image &image, const NlmParams &params);

} // namespace fcs::recon
