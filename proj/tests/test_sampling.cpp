#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "fcs/mask_io.hpp"
#include "fcs/sampling.hpp"

using namespace fcs;
using namespace fcs::sampling;
using radon::SlopeKind;

namespace {

FractalSpec pfrac_spec(int n, double r, int mu, double ctr, std::uint64_t seed,
                       Lattice lattice = Lattice::Native) {
  return FractalSpec{GridGeometry(n), r, mu, ctr, seed, lattice};
}

CartesianSpec cart_spec(int n, double r, double alpha, double ctr, std::uint64_t seed, CartesianDims dims) {
  return CartesianSpec{GridGeometry(n), r, alpha, ctr, seed, dims};
}

bool all_ones(const MaskGrid &m) {
  return std::all_of(m.storage().begin(), m.storage().end(), [](auto v) { return v == 1; });
}

} // namespace

TEST_CASE("deterministic slopes: edge cases") {
  CHECK(deterministic_slopes(GridGeometry(17), 0).empty());
  CHECK_THROWS(deterministic_slopes(GridGeometry(17), 19));
  CHECK(deterministic_slopes(GridGeometry(17), 18).size() == 18);
}

TEST_CASE("deterministic slopes match a brute-force distance sort at N=17") {
  const GridGeometry g(17);
  std::vector<std::tuple<long long, int, int>> ranked;
  for (int m = 0; m < 17; ++m) {
    // k = 1 sample of slope m sits at (-m, 1).
    const long long u = g.centred(g.wrap(-m));
    ranked.emplace_back(u * u + 1, 0, m);
  }
  ranked.emplace_back(1, 1, 0); // s = 0: (1, 0)
  std::sort(ranked.begin(), ranked.end());
  const auto got = deterministic_slopes(g, 3);
  REQUIRE(got.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(static_cast<int>(got[i].kind) == std::get<1>(ranked[i]));
    CHECK(got[i].value == std::get<2>(ranked[i]));
  }
  // Distance 1 ties: m = 0 before s = 0, then m = 1 / m = 16 at distance 2.
  CHECK(got[0] == radon::Slope{SlopeKind::M, 0});
  CHECK(got[1] == radon::Slope{SlopeKind::S, 0});
  CHECK(got[2] == radon::Slope{SlopeKind::M, 1});
}

TEST_CASE("N=257, mu=16 deterministic slopes hug the centre") {
  const GridGeometry g(257);
  const auto det = deterministic_slopes(g, 16);
  for (const auto &s : det) {
    const auto pt = radon::slice_points(s, g)[1];
    const int cu = g.centred(pt.u), cv = g.centred(pt.v);
    CHECK(cu * cu + cv * cv <= 65);
  }
}

TEST_CASE("random slopes: empty, forced and reproducible draws") {
  const GridGeometry g(17);
  CHECK(random_slopes(g, 0, 1, {}).empty());
  auto all = radon::all_slopes(g);
  const radon::Slope keep = all[7];
  std::vector<radon::Slope> exclude = all;
  exclude.erase(exclude.begin() + 7);
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto one = random_slopes(g, 1, seed, exclude);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == keep);
  }
  CHECK(random_slopes(g, 5, 42, {}) == random_slopes(g, 5, 42, {}));
  CHECK_THROWS(random_slopes(g, 19, 1, {}));
  const auto draw = random_slopes(g, 18, 5, {});
  CHECK(std::set<radon::Slope>(draw.begin(), draw.end()).size() == 18);
}

TEST_CASE("random slopes are prefix-nested in the draw count") {
  const GridGeometry g(31);
  const auto big = random_slopes(g, 20, 9, {});
  for (int nu = 0; nu <= 20; ++nu) {
    const auto small = random_slopes(g, nu, 9, {});
    CHECK(std::equal(small.begin(), small.end(), big.begin()));
  }
}

TEST_CASE("random slopes select uniformly") {
  // 10,000 seeds, nu = 5 of 18: each slope expected 10000 * 5/18 times.
  const GridGeometry g(17);
  const int seeds = 10000, nu = 5, pool = 18;
  std::vector<int> hits(pool, 0);
  for (int s = 0; s < seeds; ++s)
    for (const auto &sl : random_slopes(g, nu, static_cast<std::uint64_t>(s), {}))
      ++hits[sl.kind == SlopeKind::M ? sl.value : 17];
  const double p = static_cast<double>(nu) / pool;
  const double mean = seeds * p;
  const double sd = std::sqrt(seeds * p * (1.0 - p));
  double chi2 = 0.0;
  for (int h : hits) {
    CHECK(std::abs(h - mean) < 5.0 * sd);
    chi2 += (h - mean) * (h - mean) / mean;
  }
  // 17 degrees of freedom; 99.99th percentile is about 48.
  CHECK(chi2 < 48.0);
}

TEST_CASE("r = 1 on a prime grid leaves exactly one slice out") {
  // floor(rN) = N lines of the N + 1 available.
  const GridGeometry g(17);
  const auto mask = build_pfrac(pfrac_spec(17, 1.0, 0, 0.0, 3));
  CHECK(mask.count() == 17u * 17u - 16u);
  const auto &chosen = std::get<FractalProvenance>(mask.provenance).slopes;
  MaskGrid all = mask.selected;
  for (const auto &s : radon::all_slopes(g))
    if (std::find(chosen.begin(), chosen.end(), s) == chosen.end())
      for (const auto &pt : radon::slice_points(s, g))
        all(pt.u, pt.v) = 1;
  CHECK(all_ones(all));
  // A centre disk covering the grid closes the gap.
  CHECK(all_ones(build_pfrac(pfrac_spec(17, 1.0, 0, 13.0, 3)).selected));
}

TEST_CASE("fractal mask structure at N=257") {
  const auto mask = build_pfrac(pfrac_spec(257, 64.0 / 257.0, 16, 0.0, 11));
  const auto &prov = std::get<FractalProvenance>(mask.provenance);
  REQUIRE(prov.slopes.size() == 64);
  CHECK(mask.count() == 64u * 256u + 1u);
  CHECK(mask.selected(0, 0) == 1);
  const GridGeometry g(257);
  // Union-of-slices oracle.
  MaskGrid oracle(g, 0);
  for (const auto &s : prov.slopes)
    for (const auto &pt : radon::slice_points(s, g))
      oracle(pt.u, pt.v) = 1;
  CHECK(oracle == mask.selected);
  // Negation symmetry.
  bool symmetric = true;
  for (int u = 0; u < 257; ++u)
    for (int v = 0; v < 257; ++v)
      symmetric = symmetric && mask.selected(u, v) == mask.selected(g.wrap(-u), g.wrap(-v));
  CHECK(symmetric);
  const auto det = deterministic_slopes(g, 16);
  CHECK(std::equal(det.begin(), det.end(), prov.slopes.begin()));
}

TEST_CASE("count formula |selected| = L (N - 1) + 1 for prime N") {
  for (int lines : {1, 5, 10, 17}) {
    const auto mask = build_pfrac(pfrac_spec(17, lines / 17.0, 1, 0.0, 4));
    CHECK(mask.count() == static_cast<std::size_t>(lines * 16 + 1));
  }
}

TEST_CASE("fractal masks: centre disk, determinism, mu monotonicity") {
  const auto a = build_pfrac(pfrac_spec(101, 0.2, 4, 6.0, 77));
  const auto b = build_pfrac(pfrac_spec(101, 0.2, 4, 6.0, 77));
  CHECK(a.selected == b.selected);
  const GridGeometry g(101);
  for (int x = 0; x < 101; ++x)
    for (int y = 0; y < 101; ++y) {
      const int cx = g.centred(x), cy = g.centred(y);
      if (cx * cx + cy * cy <= 36)
        CHECK(a.selected(x, y) == 1);
    }
  const auto lo = build_pfrac(pfrac_spec(101, 0.2, 2, 0.0, 77));
  const auto hi = build_pfrac(pfrac_spec(101, 0.2, 8, 0.0, 77));
  const auto &plo = std::get<FractalProvenance>(lo.provenance).slopes;
  const auto &phi = std::get<FractalProvenance>(hi.provenance).slopes;
  const std::set<radon::Slope> det_hi(phi.begin(), phi.begin() + 8);
  for (int i = 0; i < 2; ++i)
    CHECK(det_hi.count(plo[i]) == 1);
}

TEST_CASE("fractal spec validation") {
  CHECK_THROWS(build_pfrac(pfrac_spec(17, 0.1, 5, 0.0, 1))); // mu > floor(rN)
  CHECK_THROWS(build_pfrac(pfrac_spec(17, 1.5, 0, 0.0, 1)));
  CHECK_THROWS(build_pfrac(pfrac_spec(12, 0.5, 0, 0.0, 1)));
  CHECK_THROWS(build_pfrac(pfrac_spec(17, 0.5, 0, -1.0, 1)));
}

TEST_CASE("next-prime lattice masks fit a power-of-two grid") {
  const auto mask = build_pfrac(pfrac_spec(256, 0.25, 0, 0.0, 5, Lattice::NextPrime));
  CHECK(mask.geometry().size() == 256);
  CHECK(mask.selected(0, 0) == 1);
  const auto &prov = std::get<FractalProvenance>(mask.provenance);
  CHECK(prov.slopes.size() == 64); // floor(0.25 * 257)
  CHECK(mask.count() > 60u * 250u);
  // Identical to native on a prime grid.
  const auto p = build_pfrac(pfrac_spec(17, 0.5, 1, 0.0, 5, Lattice::NextPrime));
  const auto q = build_pfrac(pfrac_spec(17, 0.5, 1, 0.0, 5, Lattice::Native));
  CHECK(p.selected == q.selected);
}

TEST_CASE("Cartesian masks: full, rows, DC, centre") {
  CHECK(all_ones(build_cartesian(cart_spec(16, 1.0, 0.0, 0.0, 1, CartesianDims::OneD)).selected));
  CHECK(all_ones(build_cartesian(cart_spec(16, 1.0, 0.0, 0.0, 1, CartesianDims::TwoD)).selected));
  const auto m = build_cartesian(cart_spec(64, 0.25, 2.0, 0.0, 9, CartesianDims::OneD));
  int rows = 0;
  for (int x = 0; x < 64; ++x) {
    int set = 0;
    for (int y = 0; y < 64; ++y)
      set += m.selected(x, y);
    CHECK((set == 0 || set == 64));
    rows += set == 64;
  }
  CHECK(rows == 16);
  CHECK(m.selected(0, 5) == 1);
  const auto p = build_cartesian(cart_spec(64, 0.1, 1.0, 0.0, 9, CartesianDims::TwoD));
  CHECK(p.count() == static_cast<std::size_t>(std::floor(0.1 * 64 * 64)));
  CHECK(p.selected(0, 0) == 1);
  const auto c = build_cartesian(cart_spec(64, 0.05, 1.0, 5.0, 9, CartesianDims::OneD));
  CHECK(c.selected(2, 3) == 1);
  CHECK(c.selected(63, 63) == 1);
  CHECK_THROWS(build_cartesian(cart_spec(16, 0.0, 0.0, 0.0, 1, CartesianDims::OneD)));
  CHECK_THROWS(build_cartesian(cart_spec(16, 0.5, -1.0, 0.0, 1, CartesianDims::OneD)));
}

TEST_CASE("variable density: row frequency falls off with distance from DC") {
  // alpha = 2, N = 256, r = 0.25 over 10,000 seeds.
  const int n = 256, seeds = 10000;
  std::vector<int> hits(n, 0);
  for (int s = 0; s < seeds; ++s) {
    const auto m = build_cartesian(cart_spec(n, 0.25, 2.0, 0.0, static_cast<std::uint64_t>(s), CartesianDims::OneD));
    for (std::size_t row : std::get<CartesianProvenance>(m.provenance).chosen)
      ++hits[row];
  }
  std::vector<double> by_distance(n / 2 + 1, 0.0);
  std::vector<int> members(n / 2 + 1, 0);
  const GridGeometry g(n);
  for (int row = 0; row < n; ++row) {
    by_distance[std::abs(g.centred(row))] += hits[row];
    ++members[std::abs(g.centred(row))];
  }
  CHECK(by_distance[0] == seeds);
  // Non-increasing within binomial noise (5 sigma of the difference).
  for (int d = 2; d <= n / 2; ++d) {
    const double a = by_distance[d - 1] / members[d - 1];
    const double b = by_distance[d] / members[d];
    const double pa = a / seeds, pb = b / seeds;
    const double sd = std::sqrt(seeds * (pa * (1 - pa) / members[d - 1] + pb * (1 - pb) / members[d]));
    CHECK(b <= a + 5.0 * sd + 1e-9);
  }
  CHECK(by_distance[1] / 2 > by_distance[100] / 2);
}

TEST_CASE("actual reduction") {
  CHECK(actual_reduction(build_cartesian(cart_spec(16, 1.0, 0.0, 0.0, 1, CartesianDims::OneD))) == 1.0);
  const auto half = build_cartesian(cart_spec(16, 0.5, 0.0, 0.0, 1, CartesianDims::OneD));
  CHECK(actual_reduction(half) == 2.0);
}

TEST_CASE("fit picks the closest factor at or above the target") {
  for (double target : {2.0, 4.0, 8.0}) {
    CAPTURE(target);
    const auto spec = fit_pfrac(pfrac_spec(257, 0.0, 0, 0.0, 21), target);
    const auto mask = build_pfrac(spec);
    CHECK(actual_reduction(mask) >= target);
    // One more line would overshoot.
    auto more = spec;
    more.r = (spec.line_count() + 1.0) / 257.0;
    CHECK(actual_reduction(build_pfrac(more)) < target);

    const auto cs = fit_cartesian(cart_spec(257, 1.0, 2.0, 21.4, 3, CartesianDims::OneD), target);
    const auto cm = build_cartesian(cs);
    CHECK(actual_reduction(cm) >= target);
    auto cmore = cs;
    cmore.r = (cs.draw_count() + 1.0) / 257.0;
    CHECK(actual_reduction(build_cartesian(cmore)) < target);
  }
  const auto with_centre = fit_pfrac(pfrac_spec(257, 0.0, 4, 21.4, 8), 4.0);
  CHECK(actual_reduction(build_pfrac(with_centre)) >= 4.0);
  CHECK(with_centre.mu == 4);
  CHECK_THROWS(fit_pfrac(pfrac_spec(17, 0.0, 0, 0.0, 1), 0.5));
}

TEST_CASE("masks round trip through PBM and sidecar") {
  const auto pf = build_pfrac(pfrac_spec(37, 0.3, 3, 2.5, 1234567890123ULL));
  const auto c1 = build_cartesian(cart_spec(20, 0.3, 1.5, 1.0, 5, CartesianDims::OneD));
  const auto c2 = build_cartesian(cart_spec(9, 0.3, 1.0, 0.0, 6, CartesianDims::TwoD));
  const auto dir = std::filesystem::temp_directory_path() / "fcs_mask_io_test";
  std::filesystem::create_directories(dir);
  for (const auto *m : {&pf, &c1, &c2}) {
    save_mask(*m, dir / "m");
    const auto back = load_mask(dir / "m");
    CHECK(back.selected == m->selected);
    CHECK(sidecar_text(back) == sidecar_text(*m));
    CHECK(std::string(back.kind_name()) == m->kind_name());
  }
  std::stringstream pbm;
  write_pbm(pbm, pf.selected);
  CHECK(read_pbm(pbm) == pf.selected);
  std::filesystem::remove_all(dir);
}
