#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kscdf/kernels.hpp"
#include "kscdf/quadrature.hpp"
#include "oracles.hpp"

using namespace kscdf;
using doctest::Approx;

namespace {

struct Shipped {
  Kernel kernel;
  oracle::K ref;
  double radius;  // integration range for the oracle
};

std::vector<Shipped> shipped() {
  return {{Kernel::gaussian(), oracle::K::gauss, 12.0},
          {Kernel::epanechnikov(), oracle::K::epan, 1.0}};
}

}  // namespace

TEST_CASE("kernel_eval examples") {
  CHECK(kernel_eval(Kernel::gaussian(), 0.0, KernelFn::cdf) == 0.5);
  CHECK(kernel_eval(Kernel::epanechnikov(), 2.0, KernelFn::pdf) == 0.0);
  CHECK(kernel_eval(Kernel::gaussian(), 0.0, KernelFn::pdf) ==
        Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-15));
  CHECK(kernel_eval(Kernel::gaussian(), 0.0, KernelFn::pdf) == Approx(0.3989423).epsilon(1e-7));
  CHECK(kernel_eval(Kernel::epanechnikov(), -3.0, KernelFn::cdf) == 0.0);
  CHECK(kernel_eval(Kernel::epanechnikov(), 3.0, KernelFn::cdf) == 1.0);
  CHECK(kernel_eval(Kernel::epanechnikov(), 1.5, KernelFn::deriv) == 0.0);
}

TEST_CASE("kernels agree with the closed-form oracle") {
  for (const auto& k : shipped()) {
    for (double u = -3.0; u <= 3.0; u += 0.173) {
      CHECK(k.kernel.pdf(u) == Approx(oracle::kpdf(k.ref, u)).epsilon(1e-14));
      CHECK(k.kernel.cdf(u) == Approx(oracle::kcdf(k.ref, u)).epsilon(1e-14));
      CHECK(k.kernel.deriv(u) == Approx(oracle::kderiv(k.ref, u)).epsilon(1e-14));
    }
  }
}

TEST_CASE("kernel invariants") {
  for (const auto& k : shipped()) {
    CAPTURE(k.kernel.name());
    const auto pdf = [&](double u) { return k.kernel.pdf(u); };
    CHECK(std::abs(oracle::simpson(pdf, -k.radius, k.radius, 200000) - 1.0) <= 1e-10);
    CHECK(k.kernel.cdf(0.0) == 0.5);
    CHECK(k.kernel.cdf(-40.0) == 0.0);
    CHECK(k.kernel.cdf(40.0) == Approx(1.0).epsilon(1e-15));

    double prev = -1.0;
    for (int i = 0; i <= 4000; ++i) {
      const double u = -4.0 + 0.002 * i;
      CHECK(k.kernel.pdf(u) == k.kernel.pdf(-u));
      const double F = k.kernel.cdf(u);
      CHECK(F >= prev);
      prev = F;
    }

    // K against quadrature of k, and k' against finite differences of k,
    // at 20 grid points inside the support.
    for (int i = 0; i < 20; ++i) {
      const double u = -0.95 + 0.1 * i;
      const double integral = oracle::simpson(pdf, -k.radius, u, 20000);
      CHECK(std::abs(k.kernel.cdf(u) - integral) <= 1e-8);
      const double step = 1e-5;
      const double fd = (k.kernel.pdf(u + step) - k.kernel.pdf(u - step)) / (2.0 * step);
      CHECK(std::abs(k.kernel.deriv(u) - fd) <= 1e-6);
    }
  }
}

TEST_CASE("gaussian moments") {
  const KernelMoments m = Kernel::gaussian().moments();
  const double e1 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double d1 = 0.5 / std::sqrt(std::numbers::pi);
  CHECK(std::abs(m.k2 - 1.0) <= 1e-8);
  CHECK(std::abs(m.e1 - e1) <= 1e-8);
  CHECK(std::abs(m.d1 - d1) <= 1e-8);
  CHECK(std::abs(m.e1 - 0.3989423) <= 1e-6);
  CHECK(std::abs(m.d1 - 0.2820948) <= 1e-6);
  CHECK(std::abs(m.V - 0.2336950) <= 1e-6);
  CHECK(std::abs(m.V - 2.0 * (e1 - d1)) <= 1e-8);
  // e2 = 1/2 and e3 = 2 phi(0) for the standard normal half-line.
  CHECK(std::abs(m.e2 - 0.5) <= 1e-8);
  CHECK(std::abs(m.e3 - 2.0 * e1) <= 1e-8);
}

TEST_CASE("epanechnikov moments") {
  const KernelMoments m = Kernel::epanechnikov().moments();
  CHECK(std::abs(m.k2 - 0.2) <= 1e-8);
  CHECK(std::abs(m.e1 - 0.1875) <= 1e-8);
  CHECK(std::abs(m.e2 - 0.1) <= 1e-8);
  CHECK(std::abs(m.d2 - 0.1) <= 1e-8);
  // d1 = int v k(v) K(v) dv by an independent polynomial integration: 9/70.
  CHECK(std::abs(m.d1 - 9.0 / 70.0) <= 1e-8);
  CHECK(std::abs(m.e3 - 0.0625) <= 1e-8);
}

TEST_CASE("moment identities for every shipped kernel") {
  for (const auto& k : shipped()) {
    const KernelMoments m = k.kernel.moments();
    CHECK(std::abs(m.e2 - m.d2) <= 1e-8);
    CHECK(m.e1 - m.d1 >= 1e-3);
    CHECK(m.V > 0.0);
    CHECK(m.k2 > 0.0);
    CHECK(std::isfinite(m.k2));

    // Cross-check d_j against a fixed-grid oracle.
    for (int j = 1; j <= 3; ++j) {
      const auto integrand = [&](double v) {
        return std::pow(v, j) * oracle::kpdf(k.ref, v) * oracle::kcdf(k.ref, v);
      };
      const double dj = oracle::simpson(integrand, -k.radius, k.radius, 400000);
      const double lib = j == 1 ? m.d1 : (j == 2 ? m.d2 : m.d3);
      CHECK(std::abs(lib - dj) <= 1e-9);
    }
  }
}

TEST_CASE("kernel_moments with a caller tolerance matches the cache") {
  for (const auto& k : shipped()) {
    const KernelMoments fresh = kernel_moments(k.kernel, 1e-11);
    CHECK(std::abs(fresh.V - k.kernel.moments().V) <= 1e-9);
  }
  CHECK_THROWS_AS(kernel_moments(Kernel::gaussian(), 0.0), std::invalid_argument);
}

TEST_CASE("self convolution matches numerical convolution") {
  for (const auto& k : shipped()) {
    for (double u : {0.0, 0.3, 1.1, 1.9, 2.5}) {
      const auto integrand = [&](double v) { return oracle::kpdf(k.ref, v) * oracle::kpdf(k.ref, u - v); };
      const double conv = oracle::simpson(integrand, -k.radius, k.radius, 200000);
      CHECK(std::abs(k.kernel.self_convolution(u) - conv) <= 1e-9);
      CHECK(k.kernel.self_convolution(u) == k.kernel.self_convolution(-u));
    }
  }
}

TEST_CASE("adaptive simpson reports the failing integral") {
  QuadratureOptions opts;
  opts.max_evaluations = 50;
  try {
    adaptive_simpson([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0, 1.0, "wiggle", opts);
    FAIL("expected a quadrature failure");
  } catch (const std::runtime_error& ex) {
    CHECK(std::string(ex.what()).find("wiggle") != std::string::npos);
  }
}

TEST_CASE("kernel names") {
  CHECK(Kernel::from_name("gaussian") == Kernel::gaussian());
  CHECK(Kernel::from_name("epanechnikov") == Kernel::epanechnikov());
  CHECK_THROWS_AS(Kernel::from_name("triweight"), std::invalid_argument);
  CHECK(Kernel::gaussian().name() == "gaussian");
  CHECK_FALSE(Kernel::gaussian().compact());
  CHECK(Kernel::epanechnikov().support_radius() == 1.0);
  CHECK(std::isinf(Kernel::gaussian().support_radius()));
}
