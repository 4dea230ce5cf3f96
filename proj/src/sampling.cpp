#include "fcs/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "fcs/random.hpp"

namespace fcs::sampling {
namespace {

// Guards floor(r * n) against r having been computed as count / n.
constexpr double kCountEpsilon = 1e-9;

int floor_count(double r, double n) { return static_cast<int>(std::floor(r * n + kCountEpsilon)); }

struct CentredRange {
  int lo;
  int hi;
  bool contains(int c) const { return c >= lo && c <= hi; }
};

CentredRange centred_range(int n) { return {-(n / 2), n - 1 - n / 2}; }

// Draws one slice of the line lattice onto the mask, cropping to the mask's
// central frequencies when the lattice is larger. Returns points newly set.
std::size_t draw_slice(MaskGrid &mask, Slope slope, const GridGeometry &lines) {
  const GridGeometry &g = mask.geometry();
  std::size_t added = 0;
  if (lines == g) {
    for (const auto &pt : radon::slice_points(slope, lines)) {
      auto &cell = mask(pt.u, pt.v);
      added += cell == 0;
      cell = 1;
    }
    return added;
  }
  const CentredRange keep = centred_range(g.size());
  for (const auto &pt : radon::slice_points(slope, lines)) {
    const int cu = lines.centred(pt.u);
    const int cv = lines.centred(pt.v);
    if (!keep.contains(cu) || !keep.contains(cv))
      continue;
    auto &cell = mask(g.wrap(cu), g.wrap(cv));
    added += cell == 0;
    cell = 1;
  }
  return added;
}

std::size_t count_selected(const MaskGrid &mask) {
  return static_cast<std::size_t>(std::count(mask.storage().begin(), mask.storage().end(), 1));
}

double density_weight(int centred, int n, double alpha) {
  const double base = 1.0 - 2.0 * std::abs(centred) / static_cast<double>(n);
  if (alpha == 0.0)
    return 1.0;
  return base <= 0.0 ? 0.0 : std::pow(base, alpha);
}

// Weighted random order without replacement (Efraimidis & Spirakis 2006):
// item i gets key log(u_i) / w_i; descending keys give the draw order. Item
// 0 (the DC row / DC point) is always first.
std::vector<std::size_t> cartesian_order(const CartesianSpec &spec) {
  const GridGeometry &g = spec.geometry;
  const int n = g.size();
  const bool one_d = spec.dims == CartesianDims::OneD;
  const std::size_t items = one_d ? static_cast<std::size_t>(n) : g.pixel_count();

  std::vector<double> row_weight(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    row_weight[i] = density_weight(g.centred(i), n, spec.alpha);

  Rng rng(spec.seed, Stream::CartesianDraw);
  std::vector<double> key(items);
  for (std::size_t i = 0; i < items; ++i) {
    const double w = one_d ? row_weight[i] : row_weight[i / n] * row_weight[i % n];
    const double u = rng.uniform_open_zero();
    key[i] = w > 0.0 ? std::log(u) / w : -std::numeric_limits<double>::infinity();
  }
  std::vector<std::size_t> order(items);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin() + 1, order.end(),
                   [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
  return order;
}

void select_item(MaskGrid &mask, std::size_t item, bool one_d, std::size_t &count) {
  const int n = mask.size();
  if (one_d) {
    for (int y = 0; y < n; ++y) {
      auto &cell = mask(static_cast<int>(item), y);
      count += cell == 0;
      cell = 1;
    }
  } else {
    auto &cell = mask[item];
    count += cell == 0;
    cell = 1;
  }
}

std::size_t point_budget(const GridGeometry &g, double target_r) {
  if (!(target_r >= 1.0))
    throw std::invalid_argument("target reduction factor must be >= 1");
  return static_cast<std::size_t>(std::floor(static_cast<double>(g.pixel_count()) / target_r));
}

} // namespace

GridGeometry FractalSpec::line_geometry() const {
  if (lattice == Lattice::NextPrime)
    return GridGeometry(next_prime(geometry.size()));
  return geometry;
}

int FractalSpec::line_count() const { return floor_count(r, line_geometry().size()); }

void FractalSpec::validate() const {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("fractal r must lie in [0, 1], got " + std::to_string(r));
  if (ctr < 0.0)
    throw std::invalid_argument("centre tiling radius must be >= 0");
  const GridGeometry lines = line_geometry();
  radon::require_prime_power(lines);
  const int total = line_count();
  if (mu < 0 || mu > total)
    throw std::invalid_argument("mu = " + std::to_string(mu) + " must lie in [0, floor(rN) = " +
                                std::to_string(total) + "]");
  if (total > lines.slope_count())
    throw std::invalid_argument("floor(rN) = " + std::to_string(total) + " exceeds the " +
                                std::to_string(lines.slope_count()) + " available slopes");
}

std::size_t CartesianSpec::draw_count() const {
  const double n = geometry.size();
  const double items = dims == CartesianDims::OneD ? n : n * n;
  return static_cast<std::size_t>(std::max(1, floor_count(r, items)));
}

void CartesianSpec::validate() const {
  if (!(r > 0.0 && r <= 1.0))
    throw std::invalid_argument("Cartesian r must lie in (0, 1], got " + std::to_string(r));
  if (!(alpha >= 0.0))
    throw std::invalid_argument("density exponent alpha must be >= 0");
  if (ctr < 0.0)
    throw std::invalid_argument("centre tiling radius must be >= 0");
}

std::size_t SamplingMask::count() const { return count_selected(selected); }

const char *SamplingMask::kind_name() const {
  if (const auto *c = std::get_if<CartesianProvenance>(&provenance))
    return c->spec.dims == CartesianDims::OneD ? "cart1d" : "cart2d";
  return "pfrac";
}

std::vector<Slope> deterministic_slopes(const GridGeometry &g, int mu) {
  auto slopes = radon::all_slopes(g);
  if (mu < 0 || mu > static_cast<int>(slopes.size()))
    throw std::invalid_argument("mu = " + std::to_string(mu) + " out of range [0, " +
                                std::to_string(slopes.size()) + "]");
  auto first_point_distance = [&](const Slope &s) {
    const auto pt = radon::slice_points(s, g)[1 % g.size()];
    const long long cu = g.centred(pt.u);
    const long long cv = g.centred(pt.v);
    return cu * cu + cv * cv;
  };
  std::vector<std::pair<long long, Slope>> ranked;
  ranked.reserve(slopes.size());
  for (const Slope &s : slopes)
    ranked.emplace_back(first_point_distance(s), s);
  // Slope ordering is already (kind M < S, value ascending).
  std::sort(ranked.begin(), ranked.end());
  std::vector<Slope> out;
  out.reserve(static_cast<std::size_t>(mu));
  for (int i = 0; i < mu; ++i)
    out.push_back(ranked[i].second);
  return out;
}

std::vector<Slope> random_slopes(const GridGeometry &g, int nu, std::uint64_t seed,
                                 std::span<const Slope> exclude) {
  std::vector<Slope> pool;
  for (const Slope &s : radon::all_slopes(g))
    if (std::find(exclude.begin(), exclude.end(), s) == exclude.end())
      pool.push_back(s);
  if (nu < 0 || nu > static_cast<int>(pool.size()))
    throw std::invalid_argument("cannot draw " + std::to_string(nu) + " slopes from " +
                                std::to_string(pool.size()) + " remaining");
  Rng rng(seed, Stream::SlopeDraw);
  for (int i = 0; i < nu; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(pool.size() - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(nu));
  return pool;
}

void fill_centre(MaskGrid &mask, double ctr) {
  if (ctr <= 0.0)
    return;
  const GridGeometry &g = mask.geometry();
  const double r2 = ctr * ctr;
  for (int x = 0; x < g.size(); ++x) {
    const double cx = g.centred(x);
    for (int y = 0; y < g.size(); ++y) {
      const double cy = g.centred(y);
      if (cx * cx + cy * cy <= r2)
        mask(x, y) = 1;
    }
  }
}

SamplingMask build_pfrac(const FractalSpec &spec) {
  spec.validate();
  const GridGeometry lines = spec.line_geometry();
  FractalProvenance prov{spec, deterministic_slopes(lines, spec.mu)};
  const auto random = random_slopes(lines, spec.random_count(), spec.seed, prov.slopes);
  prov.slopes.insert(prov.slopes.end(), random.begin(), random.end());

  MaskGrid selected(spec.geometry, 0);
  selected(0, 0) = 1;
  for (const Slope &s : prov.slopes)
    draw_slice(selected, s, lines);
  fill_centre(selected, spec.ctr);
  return SamplingMask{std::move(selected), std::move(prov)};
}

SamplingMask build_cartesian(const CartesianSpec &spec) {
  spec.validate();
  const bool one_d = spec.dims == CartesianDims::OneD;
  auto order = cartesian_order(spec);
  order.resize(spec.draw_count());
  MaskGrid selected(spec.geometry, 0);
  std::size_t count = 0;
  for (std::size_t item : order)
    select_item(selected, item, one_d, count);
  fill_centre(selected, spec.ctr);
  return SamplingMask{std::move(selected), CartesianProvenance{spec, std::move(order)}};
}

double actual_reduction(const SamplingMask &mask) {
  const std::size_t count = mask.count();
  if (count == 0)
    throw std::invalid_argument("mask selects no k-space points");
  return static_cast<double>(mask.geometry().pixel_count()) / static_cast<double>(count);
}

FractalSpec fit_pfrac(FractalSpec base, double target_r) {
  const std::size_t budget = point_budget(base.geometry, target_r);
  const GridGeometry lines = base.line_geometry();
  radon::require_prime_power(lines);
  const int max_lines = std::min(lines.size(), lines.slope_count());

  for (int mu = std::min(base.mu, max_lines); mu >= 0; --mu) {
    MaskGrid selected(base.geometry, 0);
    selected(0, 0) = 1;
    fill_centre(selected, base.ctr);
    std::size_t count = count_selected(selected);
    const auto det = deterministic_slopes(lines, mu);
    for (const Slope &s : det)
      count += draw_slice(selected, s, lines);
    if (count > budget)
      continue;
    // Each random draw is a prefix of the longest one, so adding lines one
    // at a time visits exactly the masks build_pfrac would produce.
    const auto order = random_slopes(lines, max_lines - mu, base.seed, det);
    int nu = 0;
    for (const Slope &s : order) {
      count += draw_slice(selected, s, lines);
      if (count > budget)
        break;
      ++nu;
    }
    base.mu = mu;
    base.r = static_cast<double>(mu + nu) / lines.size();
    return base;
  }
  throw std::invalid_argument("centre disk alone already exceeds the point budget for R = " +
                              std::to_string(target_r));
}

CartesianSpec fit_cartesian(CartesianSpec base, double target_r) {
  const std::size_t budget = point_budget(base.geometry, target_r);
  const bool one_d = base.dims == CartesianDims::OneD;
  base.r = 1.0;
  const auto order = cartesian_order(base);
  MaskGrid selected(base.geometry, 0);
  fill_centre(selected, base.ctr);
  std::size_t count = count_selected(selected);
  std::size_t taken = 0;
  const int n = base.geometry.size();
  for (std::size_t item : order) {
    std::size_t fresh = 0;
    if (one_d) {
      for (int y = 0; y < n; ++y)
        fresh += selected(static_cast<int>(item), y) == 0;
    } else {
      fresh = selected[item] == 0;
    }
    if (count + fresh > budget)
      break;
    select_item(selected, item, one_d, count);
    ++taken;
  }
  if (taken == 0)
    throw std::invalid_argument("centre disk alone already exceeds the point budget for R = " +
                                std::to_string(target_r));
  const double items = one_d ? base.geometry.size() : static_cast<double>(base.geometry.pixel_count());
  base.r = static_cast<double>(taken) / items;
  return base;
}

} // namespace fcs::sampling
