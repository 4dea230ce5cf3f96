#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "fcs/finite_radon.hpp"
#include "fcs/grid.hpp"
#include "fcs/nlm.hpp"
#include "fcs/sampling.hpp"

namespace fcs::recon {

/// Measured k-space: unsampled coefficients are zero.
struct MaskedKSpace {
  KSpace data;
  sampling::SamplingMask mask;

  const GridGeometry &geometry() const { return data.geometry(); }
};

/// Zeroes every coefficient the mask does not select.
void apply_mask(KSpace &k, const MaskGrid &mask);

/// Denoising strength per iteration.
struct HSchedule {
  enum class Kind {
    /// h0 for the first half, h0/2 until 90 %, h0/4 for the last 10 %.
    Staged,
    /// h0 (1 - t/total)^exponent.
    PowerCurve,
  };
  Kind kind = Kind::Staged;
  double h0 = 0.0;
  double exponent = 1.0;

  static HSchedule staged(double h0) { return {Kind::Staged, h0, 1.0}; }
  static HSchedule power_curve(double h0, double exponent) { return {Kind::PowerCurve, h0, exponent}; }
};

/// h at iteration t of `total`; t == total is allowed and gives the end value.
double h_schedule_eval(const HSchedule &schedule, int t, int total);

enum class Solver { FFR, FSIRT, CsBaseline, ZeroFill };

struct ReconConfig {
  /// Relaxation in (0, 2).
  double lambda_relax = 1.0;
  int iterations = 100;
  int denoise_every = 3;
  HSchedule schedule = HSchedule::staged(0.0);
  Solver solver = Solver::FFR;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  /// ||y - P F x||_2 of the iterate entering this iteration's update.
  double residual_l2 = 0.0;
  /// Strength of the denoise applied after this iteration's update (0 = none).
  double h_applied = 0.0;
  /// Filled when a ground truth is supplied.
  std::optional<double> psnr_vs_ground;
};

struct ReconResult {
  Image image;
  std::vector<IterationRecord> log;
};

/// Optional hooks for a reconstruction run.
struct ReconObserver {
  /// Magnitude ground truth in [0, 255] for per-iteration PSNR.
  const RealImage *ground_truth = nullptr;
  /// Called with every iterate after its update and optional denoise.
  std::function<void(int iter, const Image &)> on_iterate;
};

class DivergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

Image zero_fill(const MaskedKSpace &y);

/// Finite Fourier reconstruction: x <- x + lambda F^H (y - P F x), starting
/// from the zero-fill image, with NLM every `denoise_every` iterations. The
/// last iteration always ends on the data update. Throws DivergenceError when
/// the residual exceeds 10x the residual of the zero image, ||y||.
ReconResult ffr(const MaskedKSpace &y, const ReconConfig &config, const NlmParams &nlm,
                const ReconObserver &observer = {});

/// Finite SIRT over DRT projections of the mask's slopes:
/// x <- x + lambda B (g - R x), B the slice back-projection with overlap
/// averaging. `g` must hold exactly the mask's slopes; masks with a centre
/// disk, or drawn on a different lattice, are rejected.
ReconResult fsirt(const radon::Sinogram &g, const sampling::SamplingMask &mask, const ReconConfig &config,
                  const NlmParams &nlm, const ReconObserver &observer = {});

/// Per-pixel sqrt(sum_c |x_c|^2).
RealImage rss_combine(std::span<const Image> channels);

void write_iteration_csv(std::ostream &out, const std::vector<IterationRecord> &log);

} // namespace fcs::recon
