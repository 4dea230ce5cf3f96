#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcs {

using Complex = std::complex<double>;

/// Side length and prime factorisation of an N x N periodic grid.
class GridGeometry {
public:
  explicit GridGeometry(int n);

  int size() const { return n_; }
  /// Smallest prime factor of N.
  int prime() const { return p_; }
  /// n such that N = p^n, or 0 when N is not a prime power.
  int exponent() const { return exponent_; }
  bool is_prime() const { return exponent_ == 1; }
  bool is_prime_power() const { return exponent_ > 0; }

  int m_slope_count() const { return n_; }
  int s_slope_count() const { return n_ / p_; }
  int slope_count() const { return m_slope_count() + s_slope_count(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(n_) * n_; }

  /// Index wrapped into [0, N).
  int wrap(long long v) const {
    long long r = v % n_;
    return static_cast<int>(r < 0 ? r + n_ : r);
  }
  /// Coordinate in the centred range [-floor(N/2), N - 1 - floor(N/2)].
  int centred(int index) const {
    const int half = n_ / 2;
    return wrap(static_cast<long long>(index) + half) - half;
  }

  friend bool operator==(const GridGeometry &a, const GridGeometry &b) {
    return a.n_ == b.n_;
  }

private:
  int n_;
  int p_;
  int exponent_;
};

bool is_prime(int n);
int next_prime(int n);
int smallest_prime_factor(int n);

struct ImageDomain;
struct FrequencyDomain;

/// Dense N x N grid, row-major, element (x, y) at x * N + y.
template <typename T, typename Domain> class Grid {
public:
  using value_type = T;

  explicit Grid(GridGeometry geometry, T fill = T{})
      : geometry_(geometry), data_(geometry.pixel_count(), fill) {}
  Grid(GridGeometry geometry, std::vector<T> data)
      : geometry_(geometry), data_(std::move(data)) {
    if (data_.size() != geometry_.pixel_count())
      throw std::invalid_argument("grid data size " + std::to_string(data_.size()) +
                                  " does not match " + std::to_string(geometry_.size()) + "^2");
  }

  const GridGeometry &geometry() const { return geometry_; }
  int size() const { return geometry_.size(); }

  T &operator()(int x, int y) { return data_[index(x, y)]; }
  const T &operator()(int x, int y) const { return data_[index(x, y)]; }
  T &operator[](std::size_t i) { return data_[i]; }
  const T &operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }
  std::vector<T> &storage() { return data_; }
  const std::vector<T> &storage() const { return data_; }

  friend bool operator==(const Grid &a, const Grid &b) {
    return a.geometry_ == b.geometry_ && a.data_ == b.data_;
  }

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(x) * static_cast<std::size_t>(geometry_.size()) +
           static_cast<std::size_t>(y);
  }

  GridGeometry geometry_;
  std::vector<T> data_;
};

using Image = Grid<Complex, ImageDomain>;
using RealImage = Grid<double, ImageDomain>;
using KSpace = Grid<Complex, FrequencyDomain>;
/// Boolean selector over k-space (0 or 1 per coefficient).
using MaskGrid = Grid<std::uint8_t, FrequencyDomain>;
using CountGrid = Grid<int, FrequencyDomain>;

/// Same values reinterpreted in the other domain; used where the data is
/// legitimately both (e.g. a PSF is the image-domain counterpart of a mask).
template <typename To, typename From> To reinterpret_domain(const From &g) {
  return To(g.geometry(), g.storage());
}

RealImage magnitude(const Image &image);
RealImage real_part(const Image &image);
Image to_complex(const RealImage &image);

/// Thrown when two grids that must agree in size do not.
class GeometryMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

void require_same_geometry(const GridGeometry &a, const GridGeometry &b, const char *what);

} // namespace fcs
