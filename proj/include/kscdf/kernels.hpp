#pragma once

#include <string_view>

namespace kscdf {

enum class KernelKind { gaussian, epanechnikov };

enum class KernelFn { pdf, cdf, deriv };

// Moment constants of a symmetric kernel k with cdf K:
//   k2 = int u^2 k(u) du
//   e_j = int_0^inf v^j k(v) dv
//   d_j = int v^j k(v) K(v) dv   (whole line)
//   V = 2 (e1 - d1), the variance constant of the discrepancy process.
struct KernelMoments {
  double k2 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double V = 0.0;
};

// A symmetric second-order kernel. Cheap to copy; all members are pure.
class Kernel {
 public:
  static Kernel gaussian() { return Kernel(KernelKind::gaussian); }
  static Kernel epanechnikov() { return Kernel(KernelKind::epanechnikov); }
  // Accepts "gaussian" or "epanechnikov"; throws std::invalid_argument otherwise.
  static Kernel from_name(std::string_view name);

  KernelKind kind() const { return kind_; }
  std::string_view name() const;

  double pdf(double u) const;
  double cdf(double u) const;
  double deriv(double u) const;

  // k(u) = 0 for |u| > support_radius(); infinite for the Gaussian.
  double support_radius() const;
  // Radius beyond which K is treated as exactly 0 or 1 by windowed sums
  // (12 for the Gaussian, the support radius for compact kernels).
  double window_radius() const;
  bool compact() const { return kind_ != KernelKind::gaussian; }

  // (k * k)(u), the self-convolution used by least-squares cross-validation.
  double self_convolution(double u) const;
  double self_convolution_radius() const;

  // Moments computed once per kernel kind by quadrature at tolerance 1e-10.
  const KernelMoments& moments() const;

  friend bool operator==(const Kernel&, const Kernel&) = default;

 private:
  explicit Kernel(KernelKind kind) : kind_(kind) {}
  KernelKind kind_;
};

double kernel_eval(const Kernel& kernel, double u, KernelFn which);

// Computes all moment constants by adaptive Simpson quadrature to absolute
// tolerance `tol`. Throws std::runtime_error naming the integral that fails
// to converge.
KernelMoments kernel_moments(const Kernel& kernel, double tol);

}  // namespace kscdf
