#include "kscdf/bands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kscdf/normal.hpp"

namespace kscdf {

namespace {

constexpr double kSeriesCutoff = 1e-14;

// Simultaneous constants for the binomial-normal band between the 0.05 and
// 0.95 quantiles of F.
struct GlobalConstant {
  double level;
  double constant;
};
constexpr GlobalConstant kGlobalConstants[] = {{0.90, 2.89}, {0.95, 3.15}};

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

BandInterval band_from_ecdf(const BandSpec& spec, double n, double fn) {
  double half = 0.0;
  switch (spec.kind) {
    case BandKind::ks_simultaneous:
      half = spec.constant / std::sqrt(n);
      break;
    case BandKind::pointwise_normal:
    case BandKind::global_normal:
      half = spec.constant * std::sqrt(std::max(0.0, fn * (1.0 - fn))) / std::sqrt(n);
      break;
    case BandKind::bias_corrected:
      throw std::invalid_argument("bias_corrected bands are centred on the smoothed cdf; "
                                  "use corrected_band_at");
  }
  return {clip01(fn - half), clip01(fn + half)};
}

}  // namespace

double kolmogorov_cdf(double x) {
  if (!(x > 0.0)) return 0.0;
  if (x < 1.0) {
    // Jacobi-transformed form; the alternating series cancels badly here.
    const double w = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
    double sum = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * w);
      sum += term;
      if (term < kSeriesCutoff) break;
    }
    return std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < kSeriesCutoff) break;
  }
  return 1.0 - 2.0 * sum;
}

double ks_quantile(double level) {
  check_level(level);
  double lo = 0.0;
  double hi = 10.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) < level) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

BandSpec BandSpec::ks(double level) {
  return with_constant(BandKind::ks_simultaneous, level, ks_quantile(level));
}

BandSpec BandSpec::pointwise(double level) {
  check_level(level);
  return with_constant(BandKind::pointwise_normal, level, normal_quantile(0.5 * (1.0 + level)));
}

BandSpec BandSpec::global(double level) {
  check_level(level);
  for (const auto& g : kGlobalConstants) {
    if (std::abs(g.level - level) < 1e-9) {
      return with_constant(BandKind::global_normal, level, g.constant);
    }
  }
  throw std::invalid_argument(
      "global_normal constants are tabulated for levels 0.90 and 0.95 only; "
      "supply an explicit constant");
}

BandSpec BandSpec::corrected(double level, double h1, double h2) {
  if (!(h1 > 0.0 && h2 > 0.0)) {
    throw std::invalid_argument("bias_corrected band needs positive h1 and h2");
  }
  BandSpec spec = with_constant(BandKind::bias_corrected, level, ks_quantile(level));
  spec.h1 = h1;
  spec.h2 = h2;
  return spec;
}

BandSpec BandSpec::with_constant(BandKind kind, double level, double constant) {
  check_level(level);
  if (!(constant > 0.0) || !std::isfinite(constant)) {
    throw std::invalid_argument("band constant must be positive");
  }
  BandSpec spec;
  spec.kind = kind;
  spec.level = level;
  spec.constant = constant;
  return spec;
}

std::string to_string(BandKind kind) {
  switch (kind) {
    case BandKind::ks_simultaneous:
      return "ks";
    case BandKind::pointwise_normal:
      return "pointwise";
    case BandKind::global_normal:
      return "global";
    case BandKind::bias_corrected:
      return "corrected";
  }
  return "?";
}

std::string BandSpec::label() const {
  std::ostringstream os;
  os << to_string(kind) << ':' << level;
  return os.str();
}

BandInterval band_at(const BandSpec& spec, const Sample& s, double x, Side side) {
  return band_from_ecdf(spec, static_cast<double>(s.size()), ecdf_eval(s, x, side));
}

CorrectedBand corrected_band_at(const BandSpec& spec, const Sample& s, const Kernel& kernel,
                                double x) {
  if (spec.kind != BandKind::bias_corrected) {
    throw std::invalid_argument("corrected_band_at needs a bias_corrected spec");
  }
  const SmoothedEstimate smooth(s, kernel, spec.h1);
  const SmoothedEstimate slope(s, kernel, spec.h2);
  const double f1 = smoothed_cdf_eval(smooth, x);
  const double k2 = kernel.moments().k2;
  CorrectedBand out;
  out.center = f1 - 0.5 * k2 * spec.h1 * spec.h1 * kde_deriv_eval(slope, x);
  const double half = spec.constant * std::sqrt(std::max(0.0, f1 * (1.0 - f1))) /
                      std::sqrt(static_cast<double>(s.size()));
  out.band = {clip01(out.center - half), clip01(out.center + half)};
  return out;
}

MembershipReport contains(const BandSpec& spec, const SmoothedEstimate& e, const EvalSet& xs) {
  if (xs.points.empty() && !xs.include_jumps) {
    throw std::invalid_argument("contains: empty evaluation set");
  }
  if (spec.kind == BandKind::bias_corrected) {
    throw std::invalid_argument("contains: bias_corrected bands target F, not Fhat");
  }
  const Sample& s = e.sample();
  const double n = static_cast<double>(s.size());

  std::vector<PointMembership> entries;
  auto add = [&](double x, Side side, double value, double fn) {
    PointMembership p;
    p.x = x;
    p.side = side;
    p.value = value;
    p.band = band_from_ecdf(spec, n, fn);
    p.inside = p.band.contains(value);
    entries.push_back(p);
  };

  for (double x : xs.points) {
    const double value = smoothed_cdf_eval(e, x);
    const double at = ecdf_eval(s, x, Side::at);
    const double left = ecdf_eval(s, x, Side::left);
    if (left != at) add(x, Side::left, value, left);
    add(x, Side::at, value, at);
  }
  if (xs.include_jumps) {
    const JumpProfile profile = jump_profile(e);
    for (std::size_t k = 0; k < profile.points.size(); ++k) {
      add(profile.points[k], Side::left, profile.smoothed[k], profile.ecdf_left[k]);
      add(profile.points[k], Side::at, profile.smoothed[k], profile.ecdf_at[k]);
    }
  }

  if (spec.kind == BandKind::global_normal) {
    const double lo = s.quantile(0.05);
    const double hi = s.quantile(0.95);
    std::erase_if(entries, [&](const PointMembership& p) { return p.x < lo || p.x > hi; });
  }

  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.side == Side::left && b.side == Side::at;
  });

  MembershipReport report;
  for (const auto& p : entries) {
    if (!p.inside && report.all_inside) {
      report.all_inside = false;
      report.first_violation = p;
    }
  }
  report.points = std::move(entries);
  return report;
}

bool all_jumps_inside(const BandSpec& spec, const Sample& s, const JumpProfile& profile) {
  const double n = static_cast<double>(s.size());
  const bool restricted = spec.kind == BandKind::global_normal;
  const double lo = restricted ? s.quantile(0.05) : 0.0;
  const double hi = restricted ? s.quantile(0.95) : 0.0;
  for (std::size_t k = 0; k < profile.points.size(); ++k) {
    if (restricted && (profile.points[k] < lo || profile.points[k] > hi)) continue;
    const double value = profile.smoothed[k];
    if (!band_from_ecdf(spec, n, profile.ecdf_left[k]).contains(value)) return false;
    if (!band_from_ecdf(spec, n, profile.ecdf_at[k]).contains(value)) return false;
  }
  return true;
}

}  // namespace kscdf
