#include "fcs/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace fcs::metrics {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - kWindow / 2;
    taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double &t : taps)
    t /= sum;
  return taps;
}

// Separable 'valid' Gaussian filter: output is (n - 10) x (n - 10).
std::vector<double> filter_valid(const std::vector<double> &img, int n) {
  static const auto taps = gaussian_taps();
  const int m = n - kWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(m) * n);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < n; ++y) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k)
        acc += taps[k] * img[static_cast<std::size_t>(x + k) * n + y];
      rows[static_cast<std::size_t>(x) * n + y] = acc;
    }
  std::vector<double> out(static_cast<std::size_t>(m) * m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) {
      double acc = 0.0;
      for (int k = 0; k < kWindow; ++k)
        acc += taps[k] * rows[static_cast<std::size_t>(x) * n + y + k];
      out[static_cast<std::size_t>(x) * m + y] = acc;
    }
  return out;
}

double ssim_formula(double mu_a, double mu_b, double var_a, double var_b, double cov, double c1, double c2) {
  return ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
         ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
}

} // namespace

double mse(const RealImage &reference, const RealImage &test) {
  require_same_geometry(reference.geometry(), test.geometry(), "mse");
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.storage().size(); ++i) {
    const double d = reference[i] - test[i];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.storage().size());
}

double rmse(const RealImage &reference, const RealImage &test) { return std::sqrt(mse(reference, test)); }

double psnr(const RealImage &reference, const RealImage &test, double peak) {
  const double e = rmse(reference, test);
  if (e == 0.0)
    return kInfinitePsnr;
  return 20.0 * std::log10(peak / e);
}

double ssim(const RealImage &reference, const RealImage &test, double peak) {
  require_same_geometry(reference.geometry(), test.geometry(), "ssim");
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const int n = reference.size();
  const auto &a = reference.storage();
  const auto &b = test.storage();

  if (n < kWindow) {
    const double count = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= count;
    mb /= count;
    double va = 0, vb = 0, cv = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      va += (a[i] - ma) * (a[i] - ma);
      vb += (b[i] - mb) * (b[i] - mb);
      cv += (a[i] - ma) * (b[i] - mb);
    }
    return ssim_formula(ma, mb, va / count, vb / count, cv / count, c1, c2);
  }

  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, n);
  const auto mu_b = filter_valid(b, n);
  const auto s_aa = filter_valid(aa, n);
  const auto s_bb = filter_valid(bb, n);
  const auto s_ab = filter_valid(ab, n);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = s_aa[i] - mu_a[i] * mu_a[i];
    const double vb = s_bb[i] - mu_b[i] * mu_b[i];
    const double cv = s_ab[i] - mu_a[i] * mu_b[i];
    total += ssim_formula(mu_a[i], mu_b[i], va, vb, cv, c1, c2);
  }
  return total / static_cast<double>(mu_a.size());
}

MetricsReport evaluate(const RealImage &reference, const RealImage &test, double peak) {
  return {psnr(reference, test, peak), ssim(reference, test, peak), rmse(reference, test)};
}

void normalise_jointly(RealImage &reference, RealImage &test, double peak) {
  require_same_geometry(reference.geometry(), test.geometry(), "normalise_jointly");
  const double top = *std::max_element(reference.storage().begin(), reference.storage().end());
  const double scale = top > 0.0 ? peak / top : 1.0;
  for (auto &v : reference.storage())
    v *= scale;
  for (auto &v : test.storage())
    v = std::clamp(v * scale, 0.0, peak);
}

} // namespace fcs::metrics
