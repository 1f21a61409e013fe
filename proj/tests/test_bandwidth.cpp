#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kscdf/bands.hpp"
#include "kscdf/bandwidth.hpp"
#include "kscdf/densities.hpp"
#include "kscdf/io.hpp"
#include "oracles.hpp"

using namespace kscdf;
using doctest::Approx;

namespace {

// Recorded from the fixture after agreeing with an independent dense scan
// (step ratio 0.999, then bisection) to 4e-8 relative.
constexpr double kGoldenHhat = 0.496490248;

Sample draw(std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  return sample(TestDensity::std_normal(), n, rng);
}

std::vector<double> as_vector(const Sample& s) { return {s.values().begin(), s.values().end()}; }

// max |Z_n| by brute force over both sides of every observation.
double brute_zmax(const std::vector<double>& data, double h) {
  const double root_n = std::sqrt(static_cast<double>(data.size()));
  double best = 0.0;
  for (double xi : data) {
    const double F = oracle::Fhat(data, oracle::K::gauss, h, xi);
    best = std::max(best, std::abs(root_n * (F - oracle::ecdf(data, xi, false))));
    best = std::max(best, std::abs(root_n * (F - oracle::ecdf(data, xi, true))));
  }
  return best;
}

// int fhat^2 by quadrature minus twice the mean leave-one-out density.
double brute_lscv(const std::vector<double>& data, double h) {
  const double n = static_cast<double>(data.size());
  const auto sq = [&](double x) {
    const double f = oracle::fhat(data, oracle::K::gauss, h, x);
    return f * f;
  };
  const auto [lo, hi] = std::minmax_element(data.begin(), data.end());
  const double integral = oracle::simpson(sq, *lo - 12 * h, *hi + 12 * h, 40000);
  long double loo = 0.0L;
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (i != j) loo += oracle::phi((data[i] - data[j]) / h) / h;
    }
  }
  return integral - 2.0 * static_cast<double>(loo / (n * (n - 1)));
}

}  // namespace

TEST_CASE("resolve examples") {
  const Sample s = draw(100000, 1);
  CHECK(resolve(FixedRule{0.3}, s, Kernel::gaussian()) == 0.3);
  CHECK(resolve(RateRule{1.059, 0.2}, s, Kernel::gaussian()) == Approx(1.059 * s.sd() * 0.1).epsilon(1e-12));
  const Sample small = draw(81, 2);
  CHECK(resolve(RateRule{2.0, 0.25, true}, small, Kernel::gaussian()) == Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(resolve(QuickRule{0.95}, small, Kernel::gaussian()) ==
        quick_rule_bandwidth(small, Kernel::gaussian(), 0.95));
  CHECK(resolve(MaxSmoothRule{0.95}, small, Kernel::gaussian()) ==
        max_smoothing_bandwidth(small, Kernel::gaussian(), 0.95).h);

  CHECK_THROWS_AS(validate(FixedRule{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(RateRule{1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(RateRule{-1.0, 0.2}), std::invalid_argument);
  CHECK_THROWS_AS(validate(QuickRule{1.0}), std::invalid_argument);
  CHECK(is_deterministic(FixedRule{1.0}));
  CHECK(is_deterministic(RateRule{1.0, 0.2, true}));
  CHECK_FALSE(is_deterministic(RateRule{1.0, 0.2}));
  CHECK_FALSE(is_deterministic(MaxSmoothRule{0.9}));
}

TEST_CASE("rule strings") {
  CHECK(to_string(FixedRule{0.3}) == "fixed:0.3");
  CHECK(to_string(RateRule{1.059, 0.2}) == "rate:a=1.059,eps=0.2");
  CHECK(to_string(RateRule{3, 0.25, true}) == "rate:a=3,eps=0.25,absolute");
  CHECK(to_string(QuickRule{0.95}) == "quick:0.95");
  CHECK(to_string(MaxSmoothRule{0.9}) == "maxsmooth:0.9");
  CHECK(to_string(ConstrainedCvRule{0.9}) == "ccv:0.9");
}

TEST_CASE("quick rule constant") {
  // sqrt(2 c / k2) phi(1)^{-1/2}
  const double root = 1.0 / std::sqrt(oracle::phi(1.0));
  for (std::size_t n : {16u, 256u, 4096u}) {
    const Sample s = draw(n, 3);
    const double scale = s.sd() * std::pow(static_cast<double>(n), -0.25);
    const double h95 = quick_rule_bandwidth(s, Kernel::gaussian(), 0.95);
    const double h90 = quick_rule_bandwidth(s, Kernel::gaussian(), 0.90);
    CHECK(h95 / scale == Approx(3.3503).epsilon(1e-3));
    CHECK(h90 / scale == Approx(3.1807).epsilon(1e-3));
    CHECK(h95 / scale == Approx(std::sqrt(2.0 * ks_quantile(0.95)) * root).epsilon(1e-12));
  }
  // n times 16 halves h exactly for the same sd.
  std::vector<double> base{-1.0, 0.0, 1.0, 2.0};
  std::vector<double> rep;
  for (int k = 0; k < 16; ++k) rep.insert(rep.end(), base.begin(), base.end());
  const Sample a(base), b(rep);
  const double ratio = (quick_rule_bandwidth(a, Kernel::gaussian(), 0.95) / a.sd()) /
                       (quick_rule_bandwidth(b, Kernel::gaussian(), 0.95) / b.sd());
  CHECK(ratio == Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(quick_rule_bandwidth(Sample({1.0, 1.0}), Kernel::gaussian(), 0.95), std::invalid_argument);
}

TEST_CASE("small-h limit leaves an admissible region") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Sample s = draw(200, seed);
    const double h = 1e-8 * (s.max() - s.min());
    const double z = z_max_abs(SmoothedEstimate(s, Kernel::gaussian(), h)).value;
    CHECK(z < ks_quantile(0.95));
    CHECK(z == Approx(0.5 / std::sqrt(200.0)).epsilon(1e-8));
  }
}

TEST_CASE("maximum smoothing bandwidth brackets the threshold") {
  for (std::size_t n : {30u, 200u, 1000u}) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const Sample s = draw(n, 10 * seed + n);
      const auto data = as_vector(s);
      for (double level : {0.90, 0.95}) {
        CAPTURE(n);
        CAPTURE(level);
        const MaxSmoothResult r = max_smoothing_bandwidth(s, Kernel::gaussian(), level);
        const double c = ks_quantile(level);
        CHECK(r.c == c);
        CHECK(brute_zmax(data, 0.999 * r.h) < c);
        CHECK(brute_zmax(data, 1.001 * r.h) >= c);
        CHECK(std::abs(r.max_abs_z - brute_zmax(data, r.h)) <= 1e-12);
        REQUIRE_FALSE(r.brackets.empty());
        CHECK(r.brackets.front().admissible <= r.h);
        CHECK(r.h <= r.brackets.front().inadmissible);
      }
    }
  }
}

TEST_CASE("full scan reports every bracket and keeps the result") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const Sample s = draw(60, 77 + seed);
    MaxSmoothOptions full;
    full.full_scan = true;
    const MaxSmoothResult quick = max_smoothing_bandwidth(s, Kernel::epanechnikov(), 0.9);
    const MaxSmoothResult all = max_smoothing_bandwidth(s, Kernel::epanechnikov(), 0.9, full);
    CHECK(quick.h == all.h);
    CHECK(all.brackets.size() >= quick.brackets.size());
    for (std::size_t i = 1; i < all.brackets.size(); ++i) {
      CHECK(all.brackets[i].inadmissible < all.brackets[i - 1].admissible);
    }
  }
}

TEST_CASE("maximum smoothing bandwidth is scale equivariant") {
  const Sample s = draw(500, 4);
  const double h = max_smoothing_bandwidth(s, Kernel::gaussian(), 0.95).h;
  for (double scale : {0.01, 3.0, 250.0}) {
    std::vector<double> moved;
    for (double v : s.values()) moved.push_back(5.0 + scale * v);
    const double hs = max_smoothing_bandwidth(Sample(moved), Kernel::gaussian(), 0.95).h;
    CHECK(hs / scale == Approx(h).epsilon(1e-6));
  }
}

TEST_CASE("golden fixture") {
  const Sample s(read_values_file(KSCDF_TEST_DATA "/std_normal_1000.txt"));
  REQUIRE(s.size() == 1000);
  const MaxSmoothResult r = max_smoothing_bandwidth(s, Kernel::gaussian(), 0.90);
  CHECK(r.h == Approx(kGoldenHhat).epsilon(1e-6));
}

TEST_CASE("maximum smoothing bandwidth errors") {
  CHECK_THROWS_AS(max_smoothing_bandwidth(Sample({2.0, 2.0, 2.0}), Kernel::gaussian(), 0.95),
                  std::invalid_argument);
  // c below the small-h limit 1 / (2 sqrt 2): nothing is admissible.
  try {
    max_smoothing_bandwidth(Sample({0.0, 1.0}), Kernel::gaussian(), 1e-4);
    FAIL("expected no admissible bandwidth");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()) == "no admissible bandwidth in range");
  }
  const MaxSmoothResult one = max_smoothing_bandwidth(Sample({0.0, 1.0}), Kernel::gaussian(), 0.95);
  CHECK(one.admissible_at_upper_limit);
}

TEST_CASE("lscv score against the brute-force oracle") {
  const Sample s = draw(150, 5);
  for (double h : {0.05, 0.2, 0.6, 2.0}) {
    CHECK(std::abs(lscv_score(s, Kernel::gaussian(), h) - brute_lscv(as_vector(s), h)) <= 1e-8);
  }
}

TEST_CASE("lscv examples") {
  const Sample s = draw(100, 6);
  const std::vector<double> one{0.37};
  CHECK(lscv_bandwidth(s, Kernel::gaussian(), one).h_star == 0.37);
  CHECK_THROWS_AS(lscv_bandwidth(Sample({1.0, 1.0, 1.0}), Kernel::gaussian(), one), std::invalid_argument);
  CHECK_THROWS_AS(lscv_bandwidth(s, Kernel::gaussian(), std::vector<double>{}), std::invalid_argument);
  // A huge bandwidth is never preferred.
  const std::vector<double> pair{0.3, 1000.0};
  CHECK(lscv_bandwidth(s, Kernel::gaussian(), pair).h_star == 0.3);

  std::vector<double> ratios;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Sample t = draw(500, 1000 + seed);
    const double reference = 1.059 * t.sd() * std::pow(500.0, -0.2);
    ratios.push_back(lscv_bandwidth(t, Kernel::gaussian(), default_cv_grid(t)).h_star / reference);
  }
  const double m = oracle::median(ratios);
  CHECK(m >= 0.5);
  CHECK(m <= 2.0);
}

TEST_CASE("constrained cross-validation") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Sample s = draw(300, 2000 + seed);
    const Kernel k = Kernel::gaussian();
    const double hhat = max_smoothing_bandwidth(s, k, 0.9).h;
    const auto grid = default_cv_grid(s);
    const CvCurve free = lscv_bandwidth(s, k, grid);
    const double h = constrained_cv_bandwidth(s, k, 0.9, grid);
    CHECK(h <= hhat);
    if (free.h_star <= hhat && lscv_score(s, k, hhat) >= lscv_score(s, k, free.h_star)) {
      CHECK(h == free.h_star);
    }
    // The result keeps Fhat inside the KS band everywhere.
    CHECK(contains(BandSpec::ks(0.9), SmoothedEstimate(s, k, h), EvalSet::all_jumps()).all_inside);

    // Every grid point above hhat: the constraint is active.
    const std::vector<double> wide{2.0 * hhat, 3.0 * hhat};
    CHECK(lscv_bandwidth(s, k, wide).h_star > hhat);
    CHECK(constrained_cv_bandwidth(s, k, 0.9, wide) == hhat);
  }
}

TEST_CASE("plug-in bandwidths for the corrected band") {
  const Sample s = draw(10000, 7);
  const double sd = s.sd();
  const double d1 = 0.5 / std::sqrt(std::numbers::pi);
  const double expect = sd * std::cbrt(2.0 * d1 / oracle::phi(1.0)) * std::pow(1e4, -1.0 / 3.0);
  CHECK(corrected_band_h1(s, Kernel::gaussian()) == Approx(expect).epsilon(1e-6));
  CHECK(corrected_band_h1(s, Kernel::gaussian()) / sd == Approx(0.061518).epsilon(2e-3));
  CHECK(corrected_band_h2(s) == Approx(sd * std::pow(1e4, -1.0 / 7.0)).epsilon(1e-14));
}

TEST_CASE("quick rule and maximum smoothing are comparable") {
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    std::vector<double> ratios;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const Sample s = draw(n, 5000 + seed);
      ratios.push_back(quick_rule_bandwidth(s, Kernel::gaussian(), 0.95) /
                       max_smoothing_bandwidth(s, Kernel::gaussian(), 0.95).h);
    }
    const double m = oracle::median(ratios);
    CAPTURE(n);
    CHECK(m >= 0.3);
    CHECK(m <= 3.0);
  }
}
