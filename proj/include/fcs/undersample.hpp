#pragma once

#include <cstdint>

#include "fcs/grid.hpp"
#include "fcs/recon.hpp"
#include "fcs/sampling.hpp"

namespace fcs::harness {

/// Additive complex Gaussian noise on every k-space sample: real and imaginary
/// parts each have standard deviation sigma / sqrt(2), so E|v|^2 = sigma^2.
struct NoiseModel {
  double sigma = 0.0;

  void validate() const;
};

/// Transforms (if given an image), adds seeded noise, then zeroes every
/// coefficient the mask leaves out.
recon::MaskedKSpace undersample(const KSpace &kspace, const sampling::SamplingMask &mask, const NoiseModel &noise,
                                std::uint64_t seed);
recon::MaskedKSpace undersample(const Image &image, const sampling::SamplingMask &mask, const NoiseModel &noise,
                                std::uint64_t seed);

} // namespace fcs::harness
