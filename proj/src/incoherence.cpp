#include "fcs/incoherence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "fcs/fft.hpp"
#include "fcs/random.hpp"
#include "fcs/text_format.hpp"

namespace fcs::incoherence {
namespace {

KSpace indicator(const MaskGrid &mask) {
  KSpace k(mask.geometry());
  for (std::size_t i = 0; i < k.storage().size(); ++i)
    k[i] = mask[i] ? 1.0 : 0.0;
  return k;
}

double ctr_or_alpha(const sampling::SamplingMask &mask) {
  if (const auto *f = std::get_if<sampling::FractalProvenance>(&mask.provenance))
    return f->spec.ctr;
  return std::get<sampling::CartesianProvenance>(mask.provenance).spec.alpha;
}

struct Summary {
  double mean = 0.0, min = 0.0, max = 0.0;
};

Summary summarise(const std::vector<double> &v) {
  Summary s;
  if (v.empty())
    return s;
  double sum = 0.0;
  for (double x : v)
    sum += x;
  s.mean = sum / static_cast<double>(v.size());
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

double column_ratio(const MaskGrid &mask, int x, int y) {
  const Image col = psf_column(mask, x, y);
  const std::size_t self = static_cast<std::size_t>(x) * mask.size() + y;
  const double peak = std::abs(col[self]);
  if (peak == 0.0)
    throw std::invalid_argument("mask selects no k-space points");
  double side = 0.0;
  for (std::size_t j = 0; j < col.storage().size(); ++j)
    if (j != self)
      side = std::max(side, std::abs(col[j]));
  return side / peak;
}

double monte_carlo_sample(const MaskGrid &mask, int bases, std::uint64_t sample_seed) {
  Rng rng(sample_seed, Stream::PsfBasis);
  const auto n = static_cast<std::uint64_t>(mask.size());
  double worst = 0.0;
  for (int b = 0; b < bases; ++b) {
    const auto idx = rng.below(n * n);
    worst = std::max(worst, column_ratio(mask, static_cast<int>(idx / n), static_cast<int>(idx % n)));
  }
  return worst;
}

} // namespace

Image psf(const MaskGrid &mask) {
  Image out = fft::inverse_2d(indicator(mask));
  const double scale = 1.0 / mask.size();
  for (auto &v : out.storage())
    v *= scale;
  return out;
}

Image psf(const sampling::SamplingMask &mask) { return psf(mask.selected); }

Image psf_column(const MaskGrid &mask, int x, int y) {
  Image basis(mask.geometry());
  basis(x, y) = 1.0;
  KSpace k = fft::forward_2d(basis);
  for (std::size_t i = 0; i < k.storage().size(); ++i)
    if (!mask[i])
      k[i] = 0.0;
  return fft::inverse_2d(k);
}

double spr_exact_value(const MaskGrid &mask) {
  const Image p = psf(mask);
  const double peak = std::abs(p[0]);
  if (peak == 0.0)
    throw std::invalid_argument("mask selects no k-space points");
  double side = 0.0;
  for (std::size_t i = 1; i < p.storage().size(); ++i)
    side = std::max(side, std::abs(p[i]));
  return side / peak;
}

IncoherenceReport spr_exact(const sampling::SamplingMask &mask) {
  IncoherenceReport r;
  r.mask_kind = mask.kind_name();
  r.n = mask.geometry().size();
  r.actual_r = sampling::actual_reduction(mask);
  r.target_r = r.actual_r;
  r.ctr_or_alpha = ctr_or_alpha(mask);
  r.method = Method::Exact;
  r.spr = r.spr_mean = r.spr_min = r.spr_max = spr_exact_value(mask.selected);
  return r;
}

IncoherenceReport spr_monte_carlo(const sampling::SamplingMask &mask, int samples, int bases_per_sample,
                                  std::uint64_t seed) {
  if (samples < 1 || bases_per_sample < 1)
    throw std::invalid_argument("Monte-Carlo SPR needs samples >= 1 and bases >= 1");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s)
    values.push_back(monte_carlo_sample(mask.selected, bases_per_sample, derive_seed(seed, s)));
  const Summary sum = summarise(values);
  IncoherenceReport r;
  r.mask_kind = mask.kind_name();
  r.n = mask.geometry().size();
  r.actual_r = sampling::actual_reduction(mask);
  r.target_r = r.actual_r;
  r.ctr_or_alpha = ctr_or_alpha(mask);
  r.method = Method::MonteCarlo;
  r.spr = r.spr_mean = sum.mean;
  r.spr_min = sum.min;
  r.spr_max = sum.max;
  r.samples = samples;
  r.bases_per_sample = bases_per_sample;
  r.seed = seed;
  return r;
}

IncoherenceReport spr_ensemble(const MaskFactory &factory, int samples, int bases_per_sample,
                               std::uint64_t seed, int threads) {
  if (samples < 1 || bases_per_sample < 0)
    throw std::invalid_argument("ensemble SPR needs samples >= 1 and bases >= 0");
  std::vector<double> spr(static_cast<std::size_t>(samples));
  std::vector<double> reduction(static_cast<std::size_t>(samples));
  std::vector<std::string> kind(static_cast<std::size_t>(samples));
  std::vector<double> param(static_cast<std::size_t>(samples));
  std::vector<int> sizes(static_cast<std::size_t>(samples));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int s = next++; s < samples; s = next++) {
      const std::uint64_t mask_seed = derive_seed(seed, static_cast<std::uint64_t>(Stream::Ensemble), s);
      const sampling::SamplingMask mask = factory(mask_seed);
      const auto i = static_cast<std::size_t>(s);
      spr[i] = bases_per_sample == 0 ? spr_exact_value(mask.selected)
                                     : monte_carlo_sample(mask.selected, bases_per_sample, mask_seed);
      reduction[i] = sampling::actual_reduction(mask);
      kind[i] = mask.kind_name();
      param[i] = ctr_or_alpha(mask);
      sizes[i] = mask.geometry().size();
    }
  };
  const int workers = std::clamp(threads, 1, samples);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
      pool.emplace_back(worker);
    for (auto &t : pool)
      t.join();
  }

  const Summary sum = summarise(spr);
  IncoherenceReport r;
  r.mask_kind = kind.front();
  r.ctr_or_alpha = param.front();
  r.n = sizes.front();
  r.actual_r = summarise(reduction).mean;
  r.target_r = r.actual_r;
  r.method = bases_per_sample == 0 ? Method::Exact : Method::MonteCarlo;
  r.spr = r.spr_mean = sum.mean;
  r.spr_min = sum.min;
  r.spr_max = sum.max;
  r.samples = samples;
  r.bases_per_sample = bases_per_sample;
  r.seed = seed;
  return r;
}

void write_csv_header(std::ostream &out) {
  out << "mask_kind,N,target_R,actual_R,ctr_or_alpha,method,spr_mean,spr_min,spr_max,samples,seed\n";
}

void write_csv_row(std::ostream &out, const IncoherenceReport &r) {
  using text::format_double;
  out << r.mask_kind << ',' << r.n << ',' << format_double(r.target_r) << ',' << format_double(r.actual_r)
      << ',' << format_double(r.ctr_or_alpha) << ',' << (r.method == Method::Exact ? "exact" : "monte_carlo")
      << ',' << format_double(r.spr_mean) << ',' << format_double(r.spr_min) << ','
      << format_double(r.spr_max) << ',' << r.samples << ',' << r.seed << '\n';
}

} // namespace fcs::incoherence
