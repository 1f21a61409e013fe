#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "kscdf/kernels.hpp"
#include "kscdf/sample.hpp"

namespace kscdf {

struct FixedRule {
  double h;
};
// h = a n^-eps, with a multiplied by the sample sd unless absolute.
struct RateRule {
  double a;
  double eps;
  bool absolute = false;
};
struct QuickRule {
  double level;
};
struct MaxSmoothRule {
  double level;
};
struct ConstrainedCvRule {
  double level;
};

using BandwidthRule = std::variant<FixedRule, RateRule, QuickRule, MaxSmoothRule, ConstrainedCvRule>;

// Checks h, a > 0, eps in (0, 1), level in (0, 1).
void validate(const BandwidthRule& rule);
// Inverse of parse_rule: "fixed:0.3", "rate:a=1.059,eps=0.2[,absolute]",
// "quick:0.95", "maxsmooth:0.9", "ccv:0.9".
std::string to_string(const BandwidthRule& rule);
// True for rules whose bandwidth is a function of n alone (fixed, absolute rate).
bool is_deterministic(const BandwidthRule& rule);

double resolve(const BandwidthRule& rule, const Sample& s, const Kernel& kernel);

struct MaxSmoothOptions {
  double upper_factor = 10.0;   // h_max = upper_factor * sd
  double lower_factor = 1e-6;   // h_min = lower_factor * sd
  double ratio = 0.97;          // geometric step of the descending grid
  double rel_tol = 1e-6;        // bisection tolerance, relative
  // Keep scanning below the first admissible grid point so that every sign
  // change of g on the grid is reported. The result is unchanged.
  bool full_scan = false;
};

struct Bracket {
  double admissible;    // g > 0 here
  double inadmissible;  // g <= 0 here, the next larger grid bandwidth
};

struct MaxSmoothResult {
  double h = 0.0;          // the maximum smoothing bandwidth
  double c = 0.0;          // KS constant used
  double max_abs_z = 0.0;  // max |Z_n| at h
  double argmax = 0.0;
  std::vector<Bracket> brackets;  // sign changes of g, largest first
  std::size_t evaluations = 0;
  // g > 0 already at h_max: the supremum lies beyond the searched range.
  bool admissible_at_upper_limit = false;
};

// sup{h > 0 : max_x |Z_n(x)| < c}, c = ks_quantile(level). Scans a
// descending geometric grid for sign changes of g(h) = c - max|Z_n| and
// bisects the largest one. Throws std::invalid_argument for a degenerate
// sample (sd = 0) and std::runtime_error("no admissible bandwidth in range")
// when g <= 0 on the whole grid.
MaxSmoothResult max_smoothing_bandwidth(const Sample& s, const Kernel& kernel, double level,
                                        const MaxSmoothOptions& options = {});

// sqrt(2c / k2) phi(1)^{-1/2} sd n^{-1/4}, c = ks_quantile(level).
double quick_rule_bandwidth(const Sample& s, const Kernel& kernel, double level);

// Least-squares cross-validation score
//   int fhat_h^2 - (2/n) sum_i fhat_{h,-i}(X_i).
double lscv_score(const Sample& s, const Kernel& kernel, double h);

struct CvCurve {
  double h_star = 0.0;
  std::vector<double> grid;
  std::vector<double> score;
};

// Minimizes lscv_score over the grid; ties go to the smallest h.
// Throws std::invalid_argument for n < 3, an empty grid or all-equal data.
CvCurve lscv_bandwidth(const Sample& s, const Kernel& kernel, std::span<const double> grid);

// 60 geometric points from 1e-3 sd to 3 sd.
std::vector<double> default_cv_grid(const Sample& s);

// lscv over {grid points <= hhat} plus hhat itself.
double constrained_cv_bandwidth(const Sample& s, const Kernel& kernel, double level,
                                std::span<const double> grid);
double constrained_cv_bandwidth(const Sample& s, const Kernel& kernel, double level);

// Plug-in bandwidths for the bias-corrected band. h1 is the pointwise
// cdf-MSE optimum under a normal reference with the sample's sd, taken at
// the point of steepest slope; h2 = sd n^{-1/7}.
double corrected_band_h1(const Sample& s, const Kernel& kernel);
double corrected_band_h2(const Sample& s);

}  // namespace kscdf
