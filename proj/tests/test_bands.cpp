#include <cmath>

#include "doctest.h"
#include "kscdf/bands.hpp"
#include "kscdf/densities.hpp"
#include "oracles.hpp"

using namespace kscdf;
using doctest::Approx;

namespace {

Sample draw(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample(TestDensity::std_normal(), n, rng);
}

// 100 points with F_n(0.495) = 0.5 exactly.
Sample hundred() {
  std::vector<double> v;
  for (int i = 0; i < 100; ++i) v.push_back(i / 100.0);
  return Sample(v);
}

}  // namespace

TEST_CASE("ks quantile") {
  CHECK(std::abs(ks_quantile(0.90) - 1.224) <= 1e-3);
  CHECK(std::abs(ks_quantile(0.95) - 1.358) <= 1e-3);
  for (double p : {0.1, 0.5, 0.9, 0.99, 0.999}) {
    CHECK(kolmogorov_cdf(ks_quantile(p)) == Approx(p).epsilon(1e-8));
  }
  for (double level : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
    CHECK_THROWS_AS(ks_quantile(level), std::invalid_argument);
  }
}

TEST_CASE("kolmogorov cdf against the alternating series") {
  for (double x = 0.3; x <= 3.0; x += 0.05) {
    CHECK(std::abs(kolmogorov_cdf(x) - oracle::kolmogorov_series(x)) <= 1e-12);
  }
  CHECK(kolmogorov_cdf(0.0) == 0.0);
  CHECK(kolmogorov_cdf(0.1) >= 0.0);
  CHECK(kolmogorov_cdf(0.1) < 1e-20);
}

TEST_CASE("band_at examples") {
  const Sample s = hundred();
  REQUIRE(ecdf_eval(s, 0.495, Side::at) == 0.5);

  const BandInterval ks = band_at(BandSpec::ks(0.95), s, 0.495, Side::at);
  CHECK(ks.lo == Approx(0.5 - 0.1358).epsilon(1e-3));
  CHECK(ks.hi == Approx(0.5 + 0.1358).epsilon(1e-3));

  const BandInterval pw = band_at(BandSpec::pointwise(0.95), s, -1.0, Side::at);
  CHECK(pw.lo == 0.0);
  CHECK(pw.hi == 0.0);

  const BandInterval g = band_at(BandSpec::global(0.90), s, 0.495, Side::at);
  CHECK(g.lo == Approx(0.3555).epsilon(1e-12));
  CHECK(g.hi == Approx(0.6445).epsilon(1e-12));
  CHECK(BandSpec::global(0.95).constant == 3.15);
  CHECK_THROWS_AS(BandSpec::global(0.80), std::invalid_argument);
  CHECK(BandSpec::pointwise(0.90).constant == Approx(1.645).epsilon(1e-3));
  CHECK(BandSpec::pointwise(0.95).constant == Approx(1.96).epsilon(1e-3));

  CHECK_THROWS_AS(band_at(BandSpec::corrected(0.9, 0.1, 0.2), s, 0.0, Side::at), std::invalid_argument);
}

TEST_CASE("band invariants") {
  const Sample s = draw(250, 1);
  const double n = 250;
  for (double x = -3.0; x <= 3.0; x += 0.05) {
    for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
      const BandInterval b = band_at(BandSpec::ks(level), s, x, Side::at);
      const double fn = ecdf_eval(s, x, Side::at);
      const double c = ks_quantile(level);
      // Exact width when no clipping applies.
      if (fn - c / std::sqrt(n) >= 0 && fn + c / std::sqrt(n) <= 1) {
        CHECK(b.width() == Approx(2.0 * c / std::sqrt(n)).epsilon(1e-12));
      }
      CHECK(0.0 <= b.lo);
      CHECK(b.lo <= b.hi);
      CHECK(b.hi <= 1.0);
    }
    // Nesting in level for every kind.
    const std::pair<BandSpec, BandSpec> pairs[] = {
        {BandSpec::ks(0.90), BandSpec::ks(0.95)},
        {BandSpec::pointwise(0.90), BandSpec::pointwise(0.95)},
        {BandSpec::global(0.90), BandSpec::global(0.95)},
        {BandSpec::ks(0.5), BandSpec::ks(0.99)},
    };
    for (const auto& [narrow, wide] : pairs) {
      const BandInterval a = band_at(narrow, s, x, Side::left);
      const BandInterval b = band_at(wide, s, x, Side::left);
      CHECK(b.lo <= a.lo);
      CHECK(a.hi <= b.hi);
    }
  }
}

TEST_CASE("contains at the discrepancy threshold") {
  for (const Kernel& k : {Kernel::gaussian(), Kernel::epanechnikov()}) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const Sample s = draw(seed * 37, seed);
      const SmoothedEstimate e(s, k, 0.1 * seed);
      const ZMax z = z_max_abs(e);
      const auto above = BandSpec::with_constant(BandKind::ks_simultaneous, 0.95, z.value + 1e-9);
      const auto below = BandSpec::with_constant(BandKind::ks_simultaneous, 0.95, z.value - 1e-9);
      const MembershipReport in = contains(above, e, EvalSet::all_jumps());
      CHECK(in.all_inside);
      CHECK_FALSE(in.first_violation.has_value());
      const MembershipReport out = contains(below, e, EvalSet::all_jumps());
      CHECK_FALSE(out.all_inside);
      REQUIRE(out.first_violation.has_value());
      CHECK(out.first_violation->x == z.location);
      CHECK(out.first_violation->side == z.side);
      CHECK(out.points.size() == 2 * s.size());

      const JumpProfile p = jump_profile(e);
      CHECK(all_jumps_inside(above, s, p));
      CHECK_FALSE(all_jumps_inside(below, s, p));
    }
  }
}

TEST_CASE("contains agrees with the sign of c - max|Z|") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Sample s = draw(200, 100 + seed);
    const double h = 0.05 * seed;
    const SmoothedEstimate e(s, Kernel::gaussian(), h);
    const double zmax = oracle::dense_grid_zmax({s.values().begin(), s.values().end()}, oracle::K::gauss, h);
    for (double level : {0.9, 0.95}) {
      const BandSpec spec = BandSpec::ks(level);
      CHECK(contains(spec, e, EvalSet::all_jumps()).all_inside == (spec.constant > zmax));
    }
  }
}

TEST_CASE("single observation lies inside the ks band") {
  const Sample one({0.0});
  for (double h : {1e-6, 0.3, 50.0}) {
    const SmoothedEstimate e(one, Kernel::gaussian(), h);
    const MembershipReport r = contains(BandSpec::ks(0.95), e, EvalSet::at({0.0}));
    CHECK(r.all_inside);
    CHECK(r.points.size() == 2);
    CHECK(contains(BandSpec::ks(0.95), e, EvalSet::all_jumps()).all_inside);
  }
}

TEST_CASE("contains errors and the global range") {
  const Sample s = draw(100, 5);
  const SmoothedEstimate e(s, Kernel::gaussian(), 0.2);
  CHECK_THROWS_AS(contains(BandSpec::ks(0.95), e, EvalSet{}), std::invalid_argument);
  CHECK_THROWS_AS(contains(BandSpec::corrected(0.9, 0.1, 0.2), e, EvalSet::at({0.0})),
                  std::invalid_argument);
  // Points beyond the 0.05 and 0.95 sample quantiles are skipped for global bands.
  const MembershipReport r = contains(BandSpec::global(0.95), e, EvalSet::at({-50.0, 0.0, 50.0}));
  for (const auto& p : r.points) {
    CHECK(p.x >= s.quantile(0.05));
    CHECK(p.x <= s.quantile(0.95));
  }
  CHECK_FALSE(r.points.empty());
  // A point list for a pointwise band keeps every point.
  CHECK(contains(BandSpec::pointwise(0.95), e, EvalSet::at({-50.0, 0.0, 50.0})).points.size() == 3);
}

TEST_CASE("corrected band") {
  const Sample s = draw(500, 6);
  const BandSpec spec = BandSpec::corrected(0.90, 0.2, 0.4);
  const CorrectedBand far = corrected_band_at(spec, s, Kernel::gaussian(), -100.0);
  CHECK(std::abs(far.center) <= 1e-12);
  CHECK(far.band.lo == 0.0);
  CHECK(far.band.hi <= 1e-12);

  const Sample pm({-1.0, 1.0});
  for (double h1 : {0.05, 0.5, 2.0}) {
    const BandSpec sym = BandSpec::corrected(0.90, h1, 0.7);
    const CorrectedBand c = corrected_band_at(sym, pm, Kernel::gaussian(), 0.0);
    CHECK(c.center == Approx(0.5).epsilon(1e-15));
    const double half = ks_quantile(0.90) * 0.5 / std::sqrt(2.0);
    CHECK(c.band.lo == Approx(0.5 - half).epsilon(1e-12));
    CHECK(c.band.hi == Approx(0.5 + half).epsilon(1e-12));
  }

  // Centre against the brute-force oracle.
  const std::vector<double> data(s.values().begin(), s.values().end());
  for (double x = -2.0; x <= 2.0; x += 0.25) {
    const CorrectedBand c = corrected_band_at(spec, s, Kernel::gaussian(), x);
    const double F = oracle::Fhat(data, oracle::K::gauss, 0.2, x);
    const double expect = F - 0.5 * 1.0 * 0.04 * oracle::fhat_deriv(data, oracle::K::gauss, 0.4, x);
    CHECK(std::abs(c.center - expect) <= 1e-12);
    CHECK(c.band.width() <= 2.0 * ks_quantile(0.9) * std::sqrt(F * (1 - F) / 500.0) + 1e-12);
  }
  CHECK_THROWS_AS(BandSpec::corrected(0.9, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(corrected_band_at(BandSpec::ks(0.9), s, Kernel::gaussian(), 0.0), std::invalid_argument);
}

TEST_CASE("band labels") {
  CHECK(to_string(BandKind::ks_simultaneous) == "ks");
  CHECK(BandSpec::ks(0.95).label().find("ks") == 0);
}
