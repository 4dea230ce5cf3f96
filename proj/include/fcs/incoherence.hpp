#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "fcs/grid.hpp"
#include "fcs/sampling.hpp"

namespace fcs::incoherence {

/// PSF of the sample-then-invert operator: value at displacement d equals
/// e_{i+d}^* F^H P_mask F e_i for every i, i.e. N^-2 sum_{k in mask} exp(+2 pi i k.d / N).
/// An all-ones mask gives a unit delta; a DC-only mask gives the constant N^-2.
Image psf(const sampling::SamplingMask &mask);
Image psf(const MaskGrid &mask);

/// One column of F^H P F applied to the basis image e_i, computed explicitly
/// with forward and inverse DFTs (no displacement shortcut).
Image psf_column(const MaskGrid &mask, int x, int y);

enum class Method { Exact, MonteCarlo };

struct IncoherenceReport {
  std::string mask_kind;
  int n = 0;
  double target_r = 0.0;
  /// Mean actual reduction over the masks evaluated.
  double actual_r = 0.0;
  double ctr_or_alpha = 0.0;
  Method method = Method::Exact;
  /// Headline value: the exact SPR for a single mask, else the sample mean.
  double spr = 0.0;
  double spr_mean = 0.0;
  double spr_min = 0.0;
  double spr_max = 0.0;
  int samples = 1;
  int bases_per_sample = 0;
  std::uint64_t seed = 0;
};

/// max_{d != 0} |psf(d)| / |psf(0)|. Throws on an empty mask.
double spr_exact_value(const MaskGrid &mask);
IncoherenceReport spr_exact(const sampling::SamplingMask &mask);

/// Per sample, draws `bases_per_sample` random basis indices i, computes the
/// PSF column of each explicitly and keeps max_{j != i} |PSF(i,j)/PSF(i,i)|.
/// Reports mean / min / max over samples.
IncoherenceReport spr_monte_carlo(const sampling::SamplingMask &mask, int samples, int bases_per_sample,
                                  std::uint64_t seed);

using MaskFactory = std::function<sampling::SamplingMask(std::uint64_t seed)>;

/// As spr_monte_carlo, but regenerates the mask for every sample from a
/// derived seed. bases_per_sample == 0 uses the exact SPR of each mask.
/// Samples are evaluated on `threads` workers; results do not depend on it.
IncoherenceReport spr_ensemble(const MaskFactory &factory, int samples, int bases_per_sample,
                               std::uint64_t seed, int threads = 1);

void write_csv_header(std::ostream &out);
void write_csv_row(std::ostream &out, const IncoherenceReport &report);

} // namespace fcs::incoherence
