#pragma once

// Independent reference implementations used by the tests. Nothing here calls
// into the library: sums are brute force over every observation, integrals
// are composite Simpson on fixed grids.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

enum class K { gauss, epan };

inline double kpdf(K k, double u) {
  if (k == K::gauss) return phi(u);
  return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

inline double kcdf(K k, double u) {
  if (k == K::gauss) return Phi(u);
  if (u <= -1.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return 0.25 * (2.0 + 3.0 * u - u * u * u);
}

inline double kderiv(K k, double u) {
  if (k == K::gauss) return -u * phi(u);
  return std::abs(u) < 1.0 ? -1.5 * u : 0.0;
}

inline double Fhat(const std::vector<double>& data, K k, double h, double x) {
  long double s = 0.0L;
  for (double xi : data) s += kcdf(k, (x - xi) / h);
  return static_cast<double>(s / data.size());
}

inline double fhat(const std::vector<double>& data, K k, double h, double x) {
  long double s = 0.0L;
  for (double xi : data) s += kpdf(k, (x - xi) / h);
  return static_cast<double>(s / (data.size() * h));
}

inline double fhat_deriv(const std::vector<double>& data, K k, double h, double x) {
  long double s = 0.0L;
  for (double xi : data) s += kderiv(k, (x - xi) / h);
  return static_cast<double>(s / (data.size() * h * h));
}

inline double ecdf(const std::vector<double>& data, double x, bool left) {
  std::size_t count = 0;
  for (double xi : data) count += left ? (xi < x) : (xi <= x);
  return static_cast<double>(count) / data.size();
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  if (panels % 2) ++panels;
  const double step = (b - a) / panels;
  long double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * step);
  return static_cast<double>(s * step / 3.0);
}

// max |Z_n| by scanning a grid of step 1e-4 * range plus both one-sided
// limits at every observation.
inline double dense_grid_zmax(const std::vector<double>& data, K k, double h) {
  const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  const double root_n = std::sqrt(static_cast<double>(data.size()));
  const double range = hi - lo;
  const double step = 1e-4 * (range > 0 ? range : 1.0);
  double best = 0.0;
  for (double x = lo - step; x <= hi + step; x += step) {
    best = std::max(best, std::abs(root_n * (Fhat(data, k, h, x) - ecdf(data, x, false))));
  }
  for (double xi : data) {
    const double f = Fhat(data, k, h, xi);
    best = std::max(best, std::abs(root_n * (f - ecdf(data, xi, false))));
    best = std::max(best, std::abs(root_n * (f - ecdf(data, xi, true))));
  }
  return best;
}

inline double kolmogorov_series(double x) {
  double s = 0.0;
  for (int k = 1; k <= 200; ++k) {
    s += ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * x * x);
  }
  return 1.0 - 2.0 * s;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace oracle
