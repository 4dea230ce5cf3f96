#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fcs/finite_radon.hpp"
#include "fcs/grid.hpp"

namespace fcs::sampling {

using radon::Slope;

/// Grid on which the fractal's discrete lines are drawn.
enum class Lattice {
  /// Lines of the mask's own N = p^n geometry.
  Native,
  /// Lines of the smallest prime P >= N, cropped to the central N x N
  /// frequencies. Identical to Native when N is prime.
  NextPrime,
};

/// Pseudo-random fractal parameters. floor(r * P) lines are drawn on the line
/// lattice of size P: `mu` deterministic lines closest to DC, the rest seeded.
struct FractalSpec {
  GridGeometry geometry;
  double r = 0.0;
  int mu = 0;
  /// Radius of the fully sampled central disk, in k-space samples; 0 disables.
  double ctr = 0.0;
  std::uint64_t seed = 0;
  Lattice lattice = Lattice::Native;

  GridGeometry line_geometry() const;
  int line_count() const;
  int random_count() const { return line_count() - mu; }
  /// Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

enum class CartesianDims { OneD, TwoD };

/// Variable-density random Cartesian parameters; weight (1 - 2|k_c|/N)^alpha.
struct CartesianSpec {
  GridGeometry geometry;
  double r = 1.0;
  double alpha = 0.0;
  double ctr = 0.0;
  std::uint64_t seed = 0;
  CartesianDims dims = CartesianDims::OneD;

  /// Rows (OneD) or points (TwoD) drawn before the centre disk is filled.
  std::size_t draw_count() const;
  void validate() const;
};

struct FractalProvenance {
  FractalSpec spec;
  /// Deterministic slopes first, then the random ones in draw order.
  std::vector<Slope> slopes;
};

struct CartesianProvenance {
  CartesianSpec spec;
  /// Row indices (OneD) or flattened x * N + y point indices (TwoD), draw order.
  std::vector<std::size_t> chosen;
};

using Provenance = std::variant<FractalProvenance, CartesianProvenance>;

struct SamplingMask {
  MaskGrid selected;
  Provenance provenance;

  const GridGeometry &geometry() const { return selected.geometry(); }
  std::size_t count() const;
  bool is_fractal() const { return std::holds_alternative<FractalProvenance>(provenance); }
  /// "pfrac", "cart1d" or "cart2d".
  const char *kind_name() const;
};

/// The mu slopes whose k = 1 sample (centred) lies closest to DC; ties go to
/// M before S, then ascending value.
std::vector<Slope> deterministic_slopes(const GridGeometry &geometry, int mu);

/// nu distinct slopes drawn uniformly from those not in `exclude`. The draw
/// is a partial Fisher-Yates shuffle over the canonical slope order, so the
/// result for nu is a prefix of the result for nu + 1.
std::vector<Slope> random_slopes(const GridGeometry &geometry, int nu, std::uint64_t seed,
                                 std::span<const Slope> exclude);

SamplingMask build_pfrac(const FractalSpec &spec);
SamplingMask build_cartesian(const CartesianSpec &spec);

/// N^2 / |selected|.
double actual_reduction(const SamplingMask &mask);

/// Marks the closed disk of radius `ctr` around DC (centred coordinates).
void fill_centre(MaskGrid &mask, double ctr);

/// Largest line count whose mask still has reduction >= target_r (the closest
/// factor at or above the target). Keeps mu unless the deterministic lines
/// alone overshoot, in which case mu is lowered.
FractalSpec fit_pfrac(FractalSpec base, double target_r);

/// Same search for Cartesian masks over the number of rows / points drawn.
CartesianSpec fit_cartesian(CartesianSpec base, double target_r);

} // namespace fcs::sampling
