#include "kscdf/theory.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kscdf/normal.hpp"

namespace kscdf {

namespace {

void check_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive and finite");
  }
}

// P{lo <= N(0,1) <= hi}, accurate when both ends sit in the same tail.
double normal_interval(double lo, double hi) {
  if (lo > 0.0) return normal_cdf(-lo) - normal_cdf(-hi);
  return normal_cdf(hi) - normal_cdf(lo);
}

}  // namespace

AsymptoticContext::AsymptoticContext(TestDensity d, const Kernel& kernel, double x_, double c_)
    : density(std::move(d)), moments(kernel.moments()), x(x_), c(c_) {
  check_positive(c, "band constant c");
}

double mean_z_leading(const AsymptoticContext& ctx, double n, double h) {
  check_positive(n, "n");
  check_positive(h, "h");
  return 0.5 * ctx.moments.k2 * std::sqrt(n) * h * h * ctx.fprime();
}

double var_z_expansion(const AsymptoticContext& ctx, double h, int order) {
  check_positive(h, "h");
  if (order < 1 || order > 3) throw std::invalid_argument("var_z_expansion: order must be 1, 2 or 3");
  const auto& m = ctx.moments;
  double v = m.V * h * ctx.f();
  // (e2 - d2) vanishes for symmetric kernels; kept so the identity is checked, not assumed.
  if (order >= 2) v -= (m.e2 - m.d2) * h * h * ctx.fprime();
  if (order == 3) {
    if (!ctx.density.has_second_deriv()) {
      throw std::domain_error("var_z_expansion: density has no second derivative");
    }
    v += (m.e3 - m.d3) * h * h * h * ctx.density.second_deriv(ctx.x) / 3.0;
  }
  return v;
}

double inclusion_prob_approx(const AsymptoticContext& ctx, double n, double h) {
  const double f = ctx.f();
  if (!(f > 0.0)) throw std::domain_error("degenerate normalization: f(x) = 0");
  const double drift = mean_z_leading(ctx, n, h);
  const double scale = std::sqrt(ctx.moments.V * f * h);
  return normal_interval((-ctx.c - drift) / scale, (ctx.c - drift) / scale);
}

AsymptoticRegime asymptotic_regime(double n, double h) {
  return {h, n * h, n * std::pow(h, 7.0)};
}

double critical_amplitude(const AsymptoticContext& ctx) {
  const double slope = std::abs(ctx.fprime());
  if (slope == 0.0) throw std::domain_error("no finite threshold: f'(x) = 0");
  return std::sqrt(2.0 * ctx.c / (slope * ctx.moments.k2));
}

double cdf_mse_expansion(const AsymptoticContext& ctx, double n, double h) {
  check_positive(n, "n");
  if (!(h >= 0.0)) throw std::invalid_argument("h must be non-negative");
  const double F = ctx.density.cdf(ctx.x);
  const double f = ctx.f();
  const double fp = ctx.fprime();
  const double k2 = ctx.moments.k2;
  return F * (1.0 - F) / n - 2.0 * ctx.moments.d1 * h * f / n +
         0.25 * k2 * k2 * h * h * h * h * fp * fp;
}

double optimal_h1(const AsymptoticContext& ctx, double n) {
  check_positive(n, "n");
  const double fp = ctx.fprime();
  if (fp == 0.0) throw std::domain_error("optimal_h1: f'(x) = 0, no interior optimum");
  const double k2 = ctx.moments.k2;
  return std::cbrt(2.0 * ctx.moments.d1 * ctx.f() / (k2 * k2 * fp * fp)) / std::cbrt(n);
}

}  // namespace kscdf
