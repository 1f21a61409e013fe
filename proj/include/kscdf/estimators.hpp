#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kscdf/kernels.hpp"
#include "kscdf/sample.hpp"

namespace kscdf {

// Which one-sided value of the empirical cdf: F_n(x) or F_n(x-).
enum class Side { at, left };

// F_n(x) = #{X_i <= x} / n, or #{X_i < x} / n for Side::left. O(log n).
double ecdf_eval(const Sample& s, double x, Side side);

// A kernel smooth of a sample at bandwidth h. Holds a reference to the
// sample, which must outlive it.
class SmoothedEstimate {
 public:
  // Throws std::invalid_argument unless h is positive and finite.
  SmoothedEstimate(const Sample& sample, const Kernel& kernel, double h);

  const Sample& sample() const { return *sample_; }
  const Kernel& kernel() const { return kernel_; }
  double bandwidth() const { return h_; }

 private:
  const Sample* sample_;
  Kernel kernel_;
  double h_;
};

// Smoothed empirical cdf n^-1 sum K((x - X_i) / h).
double smoothed_cdf_eval(const SmoothedEstimate& e, double x);
// Kernel density estimate n^-1 sum h^-1 k((x - X_i) / h).
double kde_eval(const SmoothedEstimate& e, double x);
// Derivative of the density estimate, n^-1 sum h^-2 k'((x - X_i) / h).
double kde_deriv_eval(const SmoothedEstimate& e, double x);
// Z_n(x) = sqrt(n) (Fhat_h(x) - F_n(x or x-)).
double z_process_eval(const SmoothedEstimate& e, double x, Side side);

// Smoothed cdf at many ascending points. Uses a windowed sweep, or for
// bandwidths covering many observations a clustered Taylor expansion of K
// whose truncation error is below 1e-15 per observation.
std::vector<double> smoothed_cdf_sorted(const SmoothedEstimate& e,
                                        std::span<const double> ascending_xs);

// The jump points of F_n (distinct sample values) with the smoothed cdf and
// both one-sided ecdf values at each.
struct JumpProfile {
  std::size_t n = 0;
  std::vector<double> points;
  std::vector<double> smoothed;
  std::vector<double> ecdf_at;
  std::vector<double> ecdf_left;
};

JumpProfile jump_profile(const SmoothedEstimate& e);

struct ZMax {
  double value = 0.0;     // max_x |Z_n(x)|
  double location = 0.0;  // the jump point where it is attained
  Side side = Side::at;
};

// Exact sup of |Z_n| from the 2n candidates X_i and X_i-. Between jumps
// Fhat_h increases while F_n is flat, so the sup over each gap is reached
// at one of its ends.
ZMax z_max_abs(const SmoothedEstimate& e);
ZMax z_max_abs(const JumpProfile& profile);

// A jump candidate where |Z_n| >= c, or nullopt when max |Z_n| < c. Checks
// the candidates nearest `hint` first and stops at the first hit; the values
// compared are exactly those z_max_abs would see.
std::optional<double> z_max_exceeds(const SmoothedEstimate& e, double c, double hint);

}  // namespace kscdf
