#pragma once

#include <span>
#include <vector>

#include "fcs/grid.hpp"

// Unitary discrete Fourier transforms. Forward uses exp(-2 pi i k n / N),
// every dimension scaled by 1/sqrt(N); DC sits at index 0 (no shifting).
namespace fcs::fft {

std::vector<Complex> forward_1d(std::span<const Complex> in);
std::vector<Complex> inverse_1d(std::span<const Complex> in);

KSpace forward_2d(const Image &image);
Image inverse_2d(const KSpace &kspace);

} // namespace fcs::fft
