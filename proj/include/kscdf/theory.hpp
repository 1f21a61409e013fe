#pragma once

#include "kscdf/densities.hpp"
#include "kscdf/kernels.hpp"

namespace kscdf {

// Everything the asymptotic formulas need at one point x: the true density
// (for f, f', f'' and F), the kernel constants, and the band constant c.
struct AsymptoticContext {
  TestDensity density;
  KernelMoments moments;
  double x = 0.0;
  double c = 0.0;

  // Throws std::invalid_argument unless c > 0.
  AsymptoticContext(TestDensity density, const Kernel& kernel, double x, double c);

  double f() const { return density.pdf(x); }
  double fprime() const { return density.deriv(x); }
};

// Leading drift of Z_n(x): k2 sqrt(n) h^2 f'(x) / 2.
double mean_z_leading(const AsymptoticContext& ctx, double n, double h);

// Var Z_n(x) truncated after the h^order term:
//   V h f(x) - (e2 - d2) h^2 f'(x) + (e3 - d3) h^3 f''(x) / 3.
// e2 = d2 for every symmetric kernel, so orders 1 and 2 coincide.
// Throws std::domain_error for order 3 when f'' is unavailable and
// std::invalid_argument for orders outside 1..3.
double var_z_expansion(const AsymptoticContext& ctx, double h, int order);

// Normal approximation to P{-c <= Z_n(x) <= c} using the leading drift and
// variance. Throws std::domain_error("degenerate normalization") when f(x) = 0.
double inclusion_prob_approx(const AsymptoticContext& ctx, double n, double h);

// The quantities whose limits (h -> 0, nh -> inf, nh^7 -> 0) make the
// approximation valid. Reported, never enforced.
struct AsymptoticRegime {
  double h = 0.0;
  double nh = 0.0;
  double nh7 = 0.0;
};
AsymptoticRegime asymptotic_regime(double n, double h);

// For h = a n^{-1/4}: the limiting inclusion at x is 1 for a below
// sqrt(2c / (|f'(x)| k2)) and 0 above. Throws std::domain_error when f'(x) = 0.
double critical_amplitude(const AsymptoticContext& ctx);

// E{Fhat_h(x) - F(x)}^2 ~ F(1-F)/n - 2 d1 h f / n + k2^2 h^4 f'^2 / 4.
double cdf_mse_expansion(const AsymptoticContext& ctx, double n, double h);

// Minimizer of the expansion above in h:
// (2 d1 f / (k2^2 f'^2))^{1/3} n^{-1/3}. Throws std::domain_error when f'(x) = 0.
double optimal_h1(const AsymptoticContext& ctx, double n);

}  // namespace kscdf
