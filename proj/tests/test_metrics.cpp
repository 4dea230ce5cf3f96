#include <doctest.h>

#include <cmath>

#include "fcs/metrics.hpp"
#include "helpers.hpp"

using namespace fcs;
using namespace fcs::metrics;

namespace {

double loop_mse(const RealImage &a, const RealImage &b) {
  double acc = 0.0;
  const int n = a.size();
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      acc += (a(x, y) - b(x, y)) * (a(x, y) - b(x, y));
  return acc / (n * n);
}

// Direct windowed SSIM: explicit 11x11 Gaussian sums per valid position.
double loop_ssim(const RealImage &a, const RealImage &b, double peak) {
  const int n = a.size(), w = 11;
  double taps[11][11], norm = 0.0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) {
      taps[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * 1.5 * 1.5));
      norm += taps[i][j];
    }
  const double c1 = std::pow(0.01 * peak, 2), c2 = std::pow(0.03 * peak, 2);
  double total = 0.0;
  int count = 0;
  for (int x = 0; x + w <= n; ++x)
    for (int y = 0; y + w <= n; ++y) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) {
          const double t = taps[i][j] / norm, va = a(x + i, y + j), vb = b(x + i, y + j);
          ma += t * va;
          mb += t * vb;
          saa += t * va * va;
          sbb += t * vb * vb;
          sab += t * va * vb;
        }
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
      ++count;
    }
  return total / count;
}

} // namespace

TEST_CASE("PSNR edge cases") {
  const RealImage ref = testing::random_real(16, 1, 100.0);
  CHECK(psnr(ref, ref) == kInfinitePsnr);
  RealImage off = ref;
  for (auto &v : off.storage())
    v += 255.0;
  CHECK(psnr(ref, off) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("metrics match scalar-loop oracles on random 64x64 pairs") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RealImage a = testing::random_real(64, seed), b = testing::random_real(64, seed + 100);
    const double e = loop_mse(a, b);
    CHECK(std::abs(psnr(a, b) - 10.0 * std::log10(255.0 * 255.0 / e)) < 1e-10);
    CHECK(std::abs(rmse(a, b) - std::sqrt(e)) < 1e-12);
    CHECK(std::abs(ssim(a, b) - loop_ssim(a, b, 255.0)) < 1e-10);
    CHECK(psnr(a, b) == 20.0 * std::log10(255.0 / rmse(a, b)));
  }
}

TEST_CASE("RMSE edge cases") {
  const RealImage a = testing::random_real(8, 5);
  CHECK(rmse(a, a) == 0.0);
  RealImage b = a;
  for (auto &v : b.storage())
    v -= 3.5;
  CHECK(rmse(a, b) == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("SSIM properties") {
  const RealImage a = testing::random_real(32, 7), b = testing::random_real(32, 8);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  CHECK(ssim(a, b) <= 1.0);
  RealImage neg = a;
  for (auto &v : neg.storage())
    v = 255.0 - v;
  CHECK(ssim(a, neg) < 1.0);
  const RealImage c(GridGeometry(32), 100.0), c1(GridGeometry(32), 101.0);
  CHECK(ssim(c, c1) >= 0.99);
  // Below the window size a single global window is used.
  const RealImage s1 = testing::random_real(8, 1), s2 = testing::random_real(8, 2);
  CHECK(ssim(s1, s1) == doctest::Approx(1.0));
  CHECK(ssim(s1, s2) < 1.0);
  CHECK_THROWS(ssim(a, s1));
}

TEST_CASE("joint normalisation scales by the reference peak and clips") {
  RealImage ref(GridGeometry(4), 0.0), test(GridGeometry(4), 0.0);
  ref[0] = 2.0;
  ref[1] = 1.0;
  test[0] = 4.0;
  test[1] = -1.0;
  test[2] = 1.0;
  normalise_jointly(ref, test);
  CHECK(ref[0] == 255.0);
  CHECK(ref[1] == 127.5);
  CHECK(test[0] == 255.0);
  CHECK(test[1] == 0.0);
  CHECK(test[2] == 127.5);
}
