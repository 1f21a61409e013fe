#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kscdf/estimators.hpp"
#include "kscdf/kernels.hpp"
#include "kscdf/sample.hpp"

namespace kscdf {

enum class BandKind { ks_simultaneous, pointwise_normal, global_normal, bias_corrected };

// Asymptotic Kolmogorov distribution Q(x) = 1 - 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_cdf(double x);
// c with Q(c) = level, by bisection to 1e-10. Throws std::invalid_argument
// unless 0 < level < 1.
double ks_quantile(double level);

struct BandSpec {
  BandKind kind = BandKind::ks_simultaneous;
  double level = 0.95;
  double constant = 0.0;  // c_n for the KS band, d_n for the normal bands
  double h1 = 0.0;        // bias_corrected only: smoothing bandwidth
  double h2 = 0.0;        // bias_corrected only: derivative bandwidth

  // F_n +- c/sqrt(n) with c = ks_quantile(level).
  static BandSpec ks(double level);
  // F_n +- d sqrt(F_n (1 - F_n)) / sqrt(n) with d the two-sided normal quantile.
  static BandSpec pointwise(double level);
  // Same shape as pointwise, with the simultaneous constants 2.89 (0.90) and
  // 3.15 (0.95) valid between the 0.05 and 0.95 quantiles. Other levels
  // need an explicit constant.
  static BandSpec global(double level);
  // Centre Fhat_{h1} - k2 h1^2 fhat'_{h2} / 2, half-width
  // c sqrt(Fhat_{h1} (1 - Fhat_{h1})) / sqrt(n), c = ks_quantile(level).
  static BandSpec corrected(double level, double h1, double h2);
  // Any kind with a caller-chosen critical constant.
  static BandSpec with_constant(BandKind kind, double level, double constant);

  std::string label() const;
};

std::string to_string(BandKind kind);

struct BandInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double value) const { return value >= lo && value <= hi; }
  double width() const { return hi - lo; }
};

// Band around F_n at x (or x-). Throws std::invalid_argument for
// bias_corrected specs; use corrected_band_at for those.
BandInterval band_at(const BandSpec& spec, const Sample& s, double x, Side side);

struct CorrectedBand {
  double center = 0.0;
  BandInterval band;
};

CorrectedBand corrected_band_at(const BandSpec& spec, const Sample& s, const Kernel& kernel,
                                double x);

// Evaluation set for membership checks: explicit points, optionally
// augmented with every jump candidate X_i and X_i-.
struct EvalSet {
  std::vector<double> points;
  bool include_jumps = false;

  static EvalSet all_jumps() { return EvalSet{{}, true}; }
  static EvalSet at(std::vector<double> xs) { return EvalSet{std::move(xs), false}; }
};

struct PointMembership {
  double x = 0.0;
  Side side = Side::at;
  double value = 0.0;  // Fhat_h(x)
  BandInterval band;
  bool inside = true;
};

struct MembershipReport {
  std::vector<PointMembership> points;
  bool all_inside = true;
  std::optional<PointMembership> first_violation;
};

// Whether Fhat_h lies in the band at each requested point. Explicit points
// that coincide with an observation are checked on both sides. The
// global_normal band only covers x between the empirical 0.05 and 0.95
// quantiles; points outside are skipped. Throws std::invalid_argument for an
// empty evaluation set or a bias_corrected spec.
MembershipReport contains(const BandSpec& spec, const SmoothedEstimate& e, const EvalSet& xs);

// Fhat_h inside the band at every jump candidate of a precomputed profile
// (restricted to the 0.05-0.95 quantile range for global_normal).
bool all_jumps_inside(const BandSpec& spec, const Sample& s, const JumpProfile& profile);

}  // namespace kscdf
