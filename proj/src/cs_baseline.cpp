#include "fcs/cs_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fcs/fft.hpp"

namespace fcs::recon {
namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// In-place Haar step over one line of `len` samples with the given stride.
void haar_line(Complex *line, int len, std::ptrdiff_t stride, std::vector<Complex> &tmp, bool forward) {
  const int half = len / 2;
  tmp.assign(static_cast<std::size_t>(len), Complex{});
  if (forward) {
    for (int i = 0; i < half; ++i) {
      const Complex a = line[2 * i * stride];
      const Complex b = line[(2 * i + 1) * stride];
      tmp[i] = (a + b) * kInvSqrt2;
      tmp[half + i] = (a - b) * kInvSqrt2;
    }
    if (len % 2)
      tmp[len - 1] = line[(len - 1) * stride];
  } else {
    for (int i = 0; i < half; ++i) {
      const Complex s = line[i * stride];
      const Complex d = line[(half + i) * stride];
      tmp[2 * i] = (s + d) * kInvSqrt2;
      tmp[2 * i + 1] = (s - d) * kInvSqrt2;
    }
    if (len % 2)
      tmp[len - 1] = line[(len - 1) * stride];
  }
  for (int i = 0; i < len; ++i)
    line[i * stride] = tmp[i];
}

Image haar(const Image &in, bool forward) {
  Image out = in;
  const int n = in.size();
  std::vector<Complex> tmp;
  Complex *data = out.storage().data();
  for (int x = 0; x < n; ++x)
    haar_line(data + static_cast<std::ptrdiff_t>(x) * n, n, 1, tmp, forward);
  for (int y = 0; y < n; ++y)
    haar_line(data + y, n, n, tmp, forward);
  return out;
}

// Approximation band occupies the leading n/2 x n/2 block.
bool is_detail(int x, int y, int n) { return x >= n / 2 || y >= n / 2; }

double charbonnier(Complex z, double eps) { return std::sqrt(std::norm(z) + eps * eps) - eps; }

double tv_value(const Image &x, double eps) {
  const int n = x.size();
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex v = x(i, j);
      acc += charbonnier(x((i + 1) % n, j) - v, eps) + charbonnier(x(i, (j + 1) % n) - v, eps);
    }
  return acc;
}

void add_tv_gradient(const Image &x, double weight, double eps, Image &grad) {
  const int n = x.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Complex v = x(i, j);
      const Complex dx = x((i + 1) % n, j) - v;
      const Complex dy = x(i, (j + 1) % n) - v;
      const Complex gx = weight * dx / std::sqrt(std::norm(dx) + eps * eps);
      const Complex gy = weight * dy / std::sqrt(std::norm(dy) + eps * eps);
      grad(i, j) -= gx + gy;
      grad((i + 1) % n, j) += gx;
      grad(i, (j + 1) % n) += gy;
    }
}

double wavelet_l1(const Image &x) {
  const Image c = haar_forward(x);
  const int n = x.size();
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (is_detail(i, j, n))
        acc += std::abs(c(i, j));
  return acc;
}

Image wavelet_prox(const Image &v, double threshold) {
  if (threshold <= 0.0)
    return v;
  Image c = haar_forward(v);
  const int n = v.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!is_detail(i, j, n))
        continue;
      Complex &z = c(i, j);
      const double mag = std::abs(z);
      z = mag > threshold ? z * (1.0 - threshold / mag) : Complex{};
    }
  return haar_inverse(c);
}

struct SmoothEval {
  double value;
  Image grad;
};

// Data term plus smoothed TV.
double smooth_value(const Image &x, const KSpace &y, const MaskGrid &mask, const CsBaselineConfig &cfg) {
  const KSpace fx = fft::forward_2d(x);
  double data = 0.0;
  for (std::size_t i = 0; i < fx.storage().size(); ++i)
    if (mask[i])
      data += std::norm(fx[i] - y[i]);
  return data + (cfg.tv_weight > 0.0 ? cfg.tv_weight * tv_value(x, cfg.tv_epsilon) : 0.0);
}

SmoothEval smooth_eval(const Image &x, const KSpace &y, const MaskGrid &mask, const CsBaselineConfig &cfg) {
  KSpace r = fft::forward_2d(x);
  double data = 0.0;
  for (std::size_t i = 0; i < r.storage().size(); ++i) {
    if (mask[i]) {
      r[i] -= y[i];
      data += std::norm(r[i]);
    } else {
      r[i] = 0.0;
    }
  }
  Image grad = fft::inverse_2d(r);
  for (auto &g : grad.storage())
    g *= 2.0;
  double value = data;
  if (cfg.tv_weight > 0.0) {
    value += cfg.tv_weight * tv_value(x, cfg.tv_epsilon);
    add_tv_gradient(x, cfg.tv_weight, cfg.tv_epsilon, grad);
  }
  return {value, std::move(grad)};
}

double real_inner(const Image &a, const Image &b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.storage().size(); ++i)
    acc += (std::conj(a[i]) * b[i]).real();
  return acc;
}

double squared_norm(const Image &a) {
  double acc = 0.0;
  for (const auto &v : a.storage())
    acc += std::norm(v);
  return acc;
}

} // namespace

void CsBaselineConfig::validate() const {
  if (!(wavelet_weight >= 0.0) || !(tv_weight >= 0.0))
    throw std::invalid_argument("CS baseline weights must be >= 0");
  if (iterations < 1)
    throw std::invalid_argument("CS baseline needs at least one iteration");
  if (!(initial_lipschitz > 0.0) || !(tv_epsilon > 0.0))
    throw std::invalid_argument("CS baseline step and smoothing must be > 0");
}

Image haar_forward(const Image &x) { return haar(x, true); }
Image haar_inverse(const Image &c) { return haar(c, false); }

double cs_objective(const Image &x, const KSpace &measured, const MaskGrid &mask, const CsBaselineConfig &cfg) {
  double value = smooth_value(x, measured, mask, cfg);
  if (cfg.wavelet_weight > 0.0)
    value += cfg.wavelet_weight * wavelet_l1(x);
  return value;
}

CsResult cs_baseline(const MaskedKSpace &y, const CsBaselineConfig &config) {
  config.validate();
  const MaskGrid &mask = y.mask.selected;
  require_same_geometry(y.data.geometry(), mask.geometry(), "cs_baseline");

  KSpace measured = y.data;
  apply_mask(measured, mask);
  Image x = fft::inverse_2d(measured);
  double scale = 0.0;
  for (const auto &v : x.storage())
    scale = std::max(scale, std::abs(v));
  if (scale == 0.0)
    return {x, {0.0}, true};
  for (auto &v : measured.storage())
    v /= scale;
  for (auto &v : x.storage())
    v /= scale;

  CsResult result{x, {}, true};
  double objective = cs_objective(x, measured, mask, config);
  result.objective.push_back(objective);

  Image extrapolated = x;
  double momentum = 1.0;
  double lipschitz = config.initial_lipschitz;
  for (int it = 0; it < config.iterations; ++it) {
    const SmoothEval at = smooth_eval(extrapolated, measured, mask, config);
    Image candidate = extrapolated;
    for (;;) {
      Image step = extrapolated;
      for (std::size_t i = 0; i < step.storage().size(); ++i)
        step[i] -= at.grad[i] / lipschitz;
      candidate = wavelet_prox(step, config.wavelet_weight / lipschitz);
      Image diff = candidate;
      for (std::size_t i = 0; i < diff.storage().size(); ++i)
        diff[i] -= extrapolated[i];
      const double model = at.value + real_inner(at.grad, diff) + 0.5 * lipschitz * squared_norm(diff);
      if (smooth_value(candidate, measured, mask, config) <= model + 1e-12 * std::abs(model))
        break;
      lipschitz *= 2.0;
      if (lipschitz > 1e12)
        break;
    }

    const double candidate_obj = cs_objective(candidate, measured, mask, config);
    const Image previous = x;
    const double previous_obj = objective;
    if (candidate_obj <= objective) {
      x = candidate;
      objective = candidate_obj;
    }
    if (objective > previous_obj + 1e-8 * std::abs(previous_obj))
      result.converged = false;

    const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    for (std::size_t i = 0; i < extrapolated.storage().size(); ++i)
      extrapolated[i] = x[i] + (momentum / next_momentum) * (candidate[i] - x[i]) +
                        ((momentum - 1.0) / next_momentum) * (x[i] - previous[i]);
    momentum = next_momentum;
    result.objective.push_back(objective);
  }

  for (auto &v : x.storage())
    v *= scale;
  result.image = std::move(x);
  return result;
}

} // namespace fcs::recon
