#pragma once

#include <vector>

#include "fcs/grid.hpp"
#include "fcs/recon.hpp"

namespace fcs::recon {

/// Weights apply to data rescaled so the zero-fill magnitude peaks at 1.
struct CsBaselineConfig {
  double wavelet_weight = 0.0005;
  double tv_weight = 0.001;
  int iterations = 160;
  /// Initial step 1/L0; backtracking increases L as needed.
  double initial_lipschitz = 2.0;
  /// Smoothing of |.| in the TV term.
  double tv_epsilon = 0.01;

  void validate() const;
};

struct CsResult {
  Image image;
  /// Objective of the accepted iterate, one entry per iteration (plus the start).
  std::vector<double> objective;
  /// False if the objective ever rose by more than 1e-8 (relative).
  bool converged = true;
};

/// argmin ||y - P F x||^2 + wavelet_weight ||Psi_d x||_1 + tv_weight TV(x)
/// with Psi_d the detail bands of a single-level orthonormal Haar transform
/// and TV the anisotropic, periodic, Charbonnier-smoothed total variation.
/// Solved with monotone FISTA and backtracking from the zero-fill image.
CsResult cs_baseline(const MaskedKSpace &y, const CsBaselineConfig &config);

/// The minimised objective, in the solver's normalised units.
double cs_objective(const Image &x, const KSpace &measured, const MaskGrid &mask, const CsBaselineConfig &config);

/// Single-level orthonormal 2D Haar (odd trailing row/column passes through).
Image haar_forward(const Image &x);
Image haar_inverse(const Image &c);

} // namespace fcs::recon
