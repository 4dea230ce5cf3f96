#include "fcs/grid.hpp"

#include <cmath>

namespace fcs {

int smallest_prime_factor(int n) {
  if (n < 2)
    throw std::invalid_argument("no prime factor for " + std::to_string(n));
  for (int d = 2; static_cast<long long>(d) * d <= n; ++d)
    if (n % d == 0)
      return d;
  return n;
}

bool is_prime(int n) { return n >= 2 && smallest_prime_factor(n) == n; }

int next_prime(int n) {
  int c = n < 2 ? 2 : n;
  while (!is_prime(c))
    ++c;
  return c;
}

GridGeometry::GridGeometry(int n) : n_(n), p_(0), exponent_(0) {
  if (n < 2)
    throw std::invalid_argument("grid size must be >= 2, got " + std::to_string(n));
  p_ = smallest_prime_factor(n);
  int rest = n;
  int e = 0;
  while (rest % p_ == 0) {
    rest /= p_;
    ++e;
  }
  exponent_ = rest == 1 ? e : 0;
}

RealImage magnitude(const Image &image) {
  RealImage out(image.geometry());
  for (std::size_t i = 0; i < image.storage().size(); ++i)
    out[i] = std::abs(image[i]);
  return out;
}

RealImage real_part(const Image &image) {
  RealImage out(image.geometry());
  for (std::size_t i = 0; i < image.storage().size(); ++i)
    out[i] = image[i].real();
  return out;
}

Image to_complex(const RealImage &image) {
  Image out(image.geometry());
  for (std::size_t i = 0; i < image.storage().size(); ++i)
    out[i] = Complex(image[i], 0.0);
  return out;
}

void require_same_geometry(const GridGeometry &a, const GridGeometry &b, const char *what) {
  if (!(a == b))
    throw GeometryMismatch(std::string(what) + ": grid sizes differ (" + std::to_string(a.size()) +
                           " vs " + std::to_string(b.size()) + ")");
}

} // namespace fcs
