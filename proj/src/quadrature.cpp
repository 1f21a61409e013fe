#include "kscdf/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kscdf {

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  const QuadratureOptions& options;
  std::string_view what;
  long evaluations = 0;

  double eval(double x) {
    if (++evaluations > options.max_evaluations) {
      throw std::runtime_error("quadrature: evaluation budget exhausted for " +
                               std::string(what));
    }
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth >= options.min_depth && std::abs(delta) <= 15.0 * tol) {
      return left + right + delta / 15.0;
    }
    if (depth >= options.max_depth) {
      throw std::runtime_error("quadrature: no convergence for " + std::string(what) +
                               " on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        std::string_view what, const QuadratureOptions& options) {
  if (!(options.abs_tol > 0.0)) {
    throw std::invalid_argument("quadrature: tolerance must be positive");
  }
  if (a == b) return 0.0;
  if (a > b) return -adaptive_simpson(f, b, a, what, options);
  SimpsonState state{f, options, what};
  const double fa = state.eval(a);
  const double fb = state.eval(b);
  const double m = 0.5 * (a + b);
  const double fm = state.eval(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return state.recurse(a, b, fa, fm, fb, whole, options.abs_tol, 0);
}

}  // namespace kscdf
