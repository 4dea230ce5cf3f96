#pragma once

#include <compare>
#include <span>
#include <string>
#include <vector>

#include "fcs/grid.hpp"

// Exact discrete Radon transform over the N x N periodic grid (N = p^n) and
// its inverse through the discrete Fourier slice theorem.
//
// Lines:  M-slope m:  y = m x + t      (mod N),  m in [0, N)
//         S-slope s:  x = p s y + t    (mod N),  s in [0, N/p)
// Projections:
//   R(m, t)    = sum_x I(x, <m x + t>)
//   Rperp(s,t) = sum_y I(<p s y + t>, y)
// The unitary 1D DFT of a projection equals sqrt(N) times the unitary 2D DFT
// of the image sampled along the slice returned by slice_points().
namespace fcs::radon {

enum class SlopeKind { M, S };

struct Slope {
  SlopeKind kind = SlopeKind::M;
  int value = 0;

  friend auto operator<=>(const Slope &, const Slope &) = default;
};

/// "m:3" / "s:0" token used by the mask sidecar files.
std::string to_token(Slope slope);
Slope parse_token(const std::string &token);

struct KPoint {
  int u = 0;
  int v = 0;
  friend bool operator==(const KPoint &, const KPoint &) = default;
};

/// All slopes of a prime-power geometry: M ascending, then S ascending.
std::vector<Slope> all_slopes(const GridGeometry &geometry);

/// Throws std::invalid_argument when the slope is outside its range.
void validate_slope(Slope slope, const GridGeometry &geometry);

/// Throws std::invalid_argument unless N is a prime power.
void require_prime_power(const GridGeometry &geometry);

/// A full or partial set of projections. Row r holds the N translates of
/// slopes[r]; rows are stored contiguously.
class Sinogram {
public:
  Sinogram(GridGeometry geometry, std::vector<Slope> slopes);

  const GridGeometry &geometry() const { return geometry_; }
  const std::vector<Slope> &slopes() const { return slopes_; }
  std::size_t row_count() const { return slopes_.size(); }

  std::span<Complex> row(std::size_t r);
  std::span<const Complex> row(std::size_t r) const;
  Complex &operator()(std::size_t r, int t) { return data_[r * geometry_.size() + t]; }
  const Complex &operator()(std::size_t r, int t) const { return data_[r * geometry_.size() + t]; }

  /// True when every slope of the geometry is present exactly once.
  bool is_complete() const;

private:
  GridGeometry geometry_;
  std::vector<Slope> slopes_;
  std::vector<Complex> data_;
};

/// Projections for every slope of the geometry.
Sinogram drt_forward(const Image &image);
/// Projections for the given slopes only, in the given order.
Sinogram drt_forward(const Image &image, std::span<const Slope> slopes);

/// Fast inverse via the Fourier slice theorem; requires a complete sinogram.
Image drt_inverse(const Sinogram &sinogram);

/// Slice placement for an arbitrary subset of slopes: FFT each row, place it
/// on its k-space slice, average points hit by several of the present
/// slices, and leave unvisited coefficients at zero. Returns k-space.
KSpace dfst_place(const Sinogram &sinogram);
/// inverse_2d(dfst_place(sinogram)).
Image dfst_backproject(const Sinogram &sinogram);

/// k-space coordinates of the slice, indexed by slice frequency k.
///   M-slope m -> (<-k m>, k),   S-slope s -> (k, <-k p s>)
std::vector<KPoint> slice_points(Slope slope, const GridGeometry &geometry);

/// Number of slices through each k-space coordinate when all slopes are drawn.
CountGrid multiplicity_map(const GridGeometry &geometry);
/// Same, restricted to the given slopes.
CountGrid multiplicity_map(const GridGeometry &geometry, std::span<const Slope> slopes);

/// Unitary 1D DFT of one projection.
std::vector<Complex> dfst_slice(std::span<const Complex> projection);

} // namespace fcs::radon
