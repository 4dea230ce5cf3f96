#include "fcs/recon.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "fcs/fft.hpp"
#include "fcs/metrics.hpp"
#include "fcs/text_format.hpp"

namespace fcs::recon {
namespace {

double l2(const KSpace &k) {
  double acc = 0.0;
  for (const auto &v : k.storage())
    acc += std::norm(v);
  return std::sqrt(acc);
}

double l2(const radon::Sinogram &s) {
  double acc = 0.0;
  for (std::size_t r = 0; r < s.row_count(); ++r)
    for (const auto &v : s.row(r))
      acc += std::norm(v);
  return std::sqrt(acc);
}

// Data step shared by FFR and fSIRT: returns the correction to add (before
// relaxation) and the residual norm of the current iterate.
struct Correction {
  Image delta;
  double residual;
};

using DataStep = std::function<Correction(const Image &)>;

ReconResult iterate(Image x, const DataStep &step, double reference_residual, const ReconConfig &config,
                    const NlmParams &nlm, const ReconObserver &observer) {
  config.validate();
  nlm.validate();
  ReconResult result{std::move(x), {}};
  result.log.reserve(static_cast<std::size_t>(config.iterations));
  const double limit = 10.0 * reference_residual;

  for (int t = 0; t < config.iterations; ++t) {
    IterationRecord rec;
    rec.iter = t;
    Correction c = step(result.image);
    rec.residual_l2 = c.residual;
    if (!std::isfinite(c.residual) || (limit > 0.0 && c.residual > limit))
      throw DivergenceError("residual " + std::to_string(c.residual) + " at iteration " + std::to_string(t) +
                            " exceeds 10x its initial value");
    auto &img = result.image.storage();
    for (std::size_t i = 0; i < img.size(); ++i)
      img[i] += config.lambda_relax * c.delta[i];

    const bool last = t + 1 == config.iterations;
    if (!last && (t + 1) % config.denoise_every == 0) {
      NlmParams p = nlm;
      p.h = h_schedule_eval(config.schedule, t, config.iterations);
      if (p.h > 0.0) {
        result.image = nlm_denoise(result.image, p);
        rec.h_applied = p.h;
      }
    }
    if (observer.ground_truth) {
      RealImage truth = *observer.ground_truth;
      RealImage mag = magnitude(result.image);
      metrics::normalise_jointly(truth, mag);
      rec.psnr_vs_ground = metrics::psnr(truth, mag);
    }
    if (observer.on_iterate)
      observer.on_iterate(t, result.image);
    result.log.push_back(rec);
  }
  return result;
}

} // namespace

void apply_mask(KSpace &k, const MaskGrid &mask) {
  require_same_geometry(k.geometry(), mask.geometry(), "apply_mask");
  for (std::size_t i = 0; i < k.storage().size(); ++i)
    if (!mask[i])
      k[i] = 0.0;
}

double h_schedule_eval(const HSchedule &s, int t, int total) {
  if (total < 1 || t < 0 || t > total)
    throw std::invalid_argument("schedule needs 0 <= t <= total, total >= 1");
  const double frac = static_cast<double>(t) / total;
  switch (s.kind) {
  case HSchedule::Kind::Staged:
    if (2 * t < total)
      return s.h0;
    if (10 * t < 9 * total)
      return s.h0 / 2.0;
    return s.h0 / 4.0;
  case HSchedule::Kind::PowerCurve:
    return s.h0 * std::pow(1.0 - frac, s.exponent);
  }
  return 0.0;
}

void ReconConfig::validate() const {
  if (!(lambda_relax > 0.0 && lambda_relax < 2.0))
    throw std::invalid_argument("relaxation lambda must lie in (0, 2)");
  if (iterations < 1)
    throw std::invalid_argument("iterations must be >= 1");
  if (denoise_every < 1)
    throw std::invalid_argument("denoise_every must be >= 1");
  if (!(schedule.h0 >= 0.0) || !(schedule.exponent >= 0.0))
    throw std::invalid_argument("schedule h0 and exponent must be >= 0");
}

Image zero_fill(const MaskedKSpace &y) {
  require_same_geometry(y.data.geometry(), y.mask.geometry(), "zero_fill");
  KSpace k = y.data;
  apply_mask(k, y.mask.selected);
  return fft::inverse_2d(k);
}

ReconResult ffr(const MaskedKSpace &y, const ReconConfig &config, const NlmParams &nlm,
                const ReconObserver &observer) {
  require_same_geometry(y.data.geometry(), y.mask.geometry(), "ffr");
  const MaskGrid &mask = y.mask.selected;
  KSpace measured = y.data;
  apply_mask(measured, mask);

  DataStep step = [&](const Image &x) {
    KSpace r = fft::forward_2d(x);
    for (std::size_t i = 0; i < r.storage().size(); ++i)
      r[i] = mask[i] ? measured[i] - r[i] : Complex{};
    const double res = l2(r);
    return Correction{fft::inverse_2d(r), res};
  };
  return iterate(fft::inverse_2d(measured), step, l2(measured), config, nlm, observer);
}

ReconResult fsirt(const radon::Sinogram &g, const sampling::SamplingMask &mask, const ReconConfig &config,
                  const NlmParams &nlm, const ReconObserver &observer) {
  const auto *prov = std::get_if<sampling::FractalProvenance>(&mask.provenance);
  if (!prov)
    throw std::invalid_argument("fSIRT needs a fractal mask");
  if (prov->spec.ctr > 0.0)
    throw std::invalid_argument("fSIRT cannot represent a centre-tiled mask (ctr > 0) with DRT projections");
  if (!(prov->spec.line_geometry() == mask.geometry()))
    throw std::invalid_argument("fSIRT needs the fractal drawn on the mask's own lattice");
  require_same_geometry(g.geometry(), mask.geometry(), "fsirt");
  if (g.slopes() != prov->slopes)
    throw std::invalid_argument("sinogram rows must match the mask's slopes");

  const std::vector<radon::Slope> slopes = g.slopes();
  DataStep step = [&](const Image &x) {
    radon::Sinogram r = radon::drt_forward(x, slopes);
    for (std::size_t row = 0; row < r.row_count(); ++row) {
      auto out = r.row(row);
      auto meas = g.row(row);
      for (std::size_t t = 0; t < out.size(); ++t)
        out[t] = meas[t] - out[t];
    }
    const double res = l2(r);
    return Correction{radon::dfst_backproject(r), res};
  };
  return iterate(radon::dfst_backproject(g), step, l2(g), config, nlm, observer);
}

RealImage rss_combine(std::span<const Image> channels) {
  if (channels.empty())
    throw std::invalid_argument("rss_combine needs at least one channel");
  RealImage out(channels.front().geometry(), 0.0);
  for (const Image &c : channels) {
    require_same_geometry(out.geometry(), c.geometry(), "rss_combine");
    for (std::size_t i = 0; i < c.storage().size(); ++i)
      out[i] += std::norm(c[i]);
  }
  for (auto &v : out.storage())
    v = std::sqrt(v);
  return out;
}

void write_iteration_csv(std::ostream &out, const std::vector<IterationRecord> &log) {
  out << "iter,residual_l2,h_applied,psnr_vs_ground\n";
  for (const auto &r : log) {
    out << r.iter << ',' << text::format_double(r.residual_l2) << ',' << text::format_double(r.h_applied) << ',';
    if (r.psnr_vs_ground)
      out << text::format_double(*r.psnr_vs_ground);
    out << '\n';
  }
}

} // namespace fcs::recon
