#pragma once

#include <functional>
#include <string_view>

namespace kscdf {

struct QuadratureOptions {
  double abs_tol = 1e-10;
  // Uniform bisection levels applied before adaptivity kicks in, so that
  // narrow features are not missed by the first coarse Simpson estimate.
  int min_depth = 5;
  int max_depth = 40;
  long max_evaluations = 5'000'000;
};

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance
// options.abs_tol. Throws std::runtime_error naming `what` when the
// recursion or evaluation budget is exhausted before convergence.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        std::string_view what, const QuadratureOptions& options = {});

}  // namespace kscdf
