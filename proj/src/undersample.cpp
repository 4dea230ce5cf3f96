#include "fcs/undersample.hpp"

#include <cmath>
#include <stdexcept>

#include "fcs/fft.hpp"
#include "fcs/random.hpp"

namespace fcs::harness {

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw std::invalid_argument("noise sigma must be finite and >= 0");
}

recon::MaskedKSpace undersample(const KSpace &kspace, const sampling::SamplingMask &mask, const NoiseModel &noise,
                                std::uint64_t seed) {
  noise.validate();
  require_same_geometry(kspace.geometry(), mask.geometry(), "undersample");
  KSpace out = kspace;
  if (noise.sigma > 0.0) {
    Rng rng(seed, Stream::Noise);
    const double s = noise.sigma / std::sqrt(2.0);
    // Every coefficient gets its draw so the noise does not depend on the mask.
    for (auto &v : out.storage()) {
      const double re = rng.normal();
      const double im = rng.normal();
      v += Complex(s * re, s * im);
    }
  }
  recon::apply_mask(out, mask.selected);
  return {std::move(out), mask};
}

recon::MaskedKSpace undersample(const Image &image, const sampling::SamplingMask &mask, const NoiseModel &noise,
                                std::uint64_t seed) {
  require_same_geometry(image.geometry(), mask.geometry(), "undersample");
  return undersample(fft::forward_2d(image), mask, noise, seed);
}

} // namespace fcs::harness
