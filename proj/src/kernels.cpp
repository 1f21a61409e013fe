#include "kscdf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "kscdf/normal.hpp"
#include "kscdf/quadrature.hpp"

namespace kscdf {

namespace {

constexpr double kGaussianWindow = 12.0;

}  // namespace

Kernel Kernel::from_name(std::string_view name) {
  if (name == "gaussian") return gaussian();
  if (name == "epanechnikov") return epanechnikov();
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected gaussian or epanechnikov)");
}

std::string_view Kernel::name() const {
  return kind_ == KernelKind::gaussian ? "gaussian" : "epanechnikov";
}

double Kernel::pdf(double u) const {
  switch (kind_) {
    case KernelKind::gaussian:
      return normal_pdf(u);
    case KernelKind::epanechnikov:
      return std::abs(u) < 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
  }
  return 0.0;
}

double Kernel::cdf(double u) const {
  switch (kind_) {
    case KernelKind::gaussian:
      return normal_cdf(u);
    case KernelKind::epanechnikov:
      if (u <= -1.0) return 0.0;
      if (u >= 1.0) return 1.0;
      return 0.5 + u * (0.75 - 0.25 * u * u);
  }
  return 0.0;
}

double Kernel::deriv(double u) const {
  switch (kind_) {
    case KernelKind::gaussian:
      return -u * normal_pdf(u);
    case KernelKind::epanechnikov:
      return std::abs(u) < 1.0 ? -1.5 * u : 0.0;
  }
  return 0.0;
}

double Kernel::support_radius() const {
  return kind_ == KernelKind::gaussian ? std::numeric_limits<double>::infinity() : 1.0;
}

double Kernel::window_radius() const {
  return kind_ == KernelKind::gaussian ? kGaussianWindow : 1.0;
}

double Kernel::self_convolution(double u) const {
  switch (kind_) {
    case KernelKind::gaussian:
      return normal_pdf(u / kSqrt2) / kSqrt2;
    case KernelKind::epanechnikov: {
      const double a = std::abs(u);
      if (a >= 2.0) return 0.0;
      const double t = 2.0 - a;
      return 3.0 / 160.0 * t * t * t * (a * a + 6.0 * a + 4.0);
    }
  }
  return 0.0;
}

double Kernel::self_convolution_radius() const {
  return kind_ == KernelKind::gaussian ? kGaussianWindow * kSqrt2 : 2.0;
}

const KernelMoments& Kernel::moments() const {
  static const KernelMoments gaussian_moments = kernel_moments(Kernel::gaussian(), 1e-10);
  static const KernelMoments epanechnikov_moments =
      kernel_moments(Kernel::epanechnikov(), 1e-10);
  return kind_ == KernelKind::gaussian ? gaussian_moments : epanechnikov_moments;
}

double kernel_eval(const Kernel& kernel, double u, KernelFn which) {
  switch (which) {
    case KernelFn::pdf:
      return kernel.pdf(u);
    case KernelFn::cdf:
      return kernel.cdf(u);
    case KernelFn::deriv:
      return kernel.deriv(u);
  }
  return 0.0;
}

KernelMoments kernel_moments(const Kernel& kernel, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_moments: tol must be positive");
  const double r = std::min(kernel.support_radius(), kGaussianWindow);
  QuadratureOptions options;
  options.abs_tol = tol;
  auto integrate = [&](auto&& f, double a, double b, std::string_view what) {
    return adaptive_simpson(f, a, b, what, options);
  };
  auto k = [&](double v) { return kernel.pdf(v); };
  auto kK = [&](double v) { return kernel.pdf(v) * kernel.cdf(v); };

  KernelMoments m;
  m.k2 = integrate([&](double u) { return u * u * k(u); }, -r, r, "k2 = int u^2 k(u)");
  m.e1 = integrate([&](double v) { return v * k(v); }, 0.0, r, "e1 = int_0^inf v k(v)");
  m.e2 = integrate([&](double v) { return v * v * k(v); }, 0.0, r, "e2 = int_0^inf v^2 k(v)");
  m.e3 = integrate([&](double v) { return v * v * v * k(v); }, 0.0, r,
                   "e3 = int_0^inf v^3 k(v)");
  m.d1 = integrate([&](double v) { return v * kK(v); }, -r, r, "d1 = int v k(v) K(v)");
  m.d2 = integrate([&](double v) { return v * v * kK(v); }, -r, r, "d2 = int v^2 k(v) K(v)");
  m.d3 = integrate([&](double v) { return v * v * v * kK(v); }, -r, r,
                   "d3 = int v^3 k(v) K(v)");
  m.V = 2.0 * (m.e1 - m.d1);
  return m;
}

}  // namespace kscdf
