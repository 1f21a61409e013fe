#include "kscdf/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "kscdf/bands.hpp"
#include "kscdf/estimators.hpp"
#include "kscdf/normal.hpp"
#include "kscdf/theory.hpp"

namespace kscdf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("bandwidth rule: level must lie in (0, 1)");
  }
}

void require_spread(const Sample& s, const char* who) {
  if (!(s.sd() > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": degenerate sample (sd = 0)");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

void validate(const BandwidthRule& rule) {
  std::visit(Overloaded{
                 [](const FixedRule& r) {
                   if (!(r.h > 0.0) || !std::isfinite(r.h))
                     throw std::invalid_argument("fixed rule: h must be positive");
                 },
                 [](const RateRule& r) {
                   if (!(r.a > 0.0) || !std::isfinite(r.a))
                     throw std::invalid_argument("rate rule: a must be positive");
                   if (!(r.eps > 0.0 && r.eps < 1.0))
                     throw std::invalid_argument("rate rule: eps must lie in (0, 1)");
                 },
                 [](const QuickRule& r) { check_level(r.level); },
                 [](const MaxSmoothRule& r) { check_level(r.level); },
                 [](const ConstrainedCvRule& r) { check_level(r.level); },
             },
             rule);
}

std::string to_string(const BandwidthRule& rule) {
  return std::visit(Overloaded{
                        [](const FixedRule& r) { return "fixed:" + fmt(r.h); },
                        [](const RateRule& r) {
                          return "rate:a=" + fmt(r.a) + ",eps=" + fmt(r.eps) +
                                 (r.absolute ? ",absolute" : "");
                        },
                        [](const QuickRule& r) { return "quick:" + fmt(r.level); },
                        [](const MaxSmoothRule& r) { return "maxsmooth:" + fmt(r.level); },
                        [](const ConstrainedCvRule& r) { return "ccv:" + fmt(r.level); },
                    },
                    rule);
}

bool is_deterministic(const BandwidthRule& rule) {
  if (std::holds_alternative<FixedRule>(rule)) return true;
  if (const auto* r = std::get_if<RateRule>(&rule)) return r->absolute;
  return false;
}

double resolve(const BandwidthRule& rule, const Sample& s, const Kernel& kernel) {
  validate(rule);
  const double n = static_cast<double>(s.size());
  return std::visit(
      Overloaded{
          [](const FixedRule& r) { return r.h; },
          [&](const RateRule& r) {
            if (!r.absolute) require_spread(s, "rate rule");
            return (r.absolute ? r.a : r.a * s.sd()) * std::pow(n, -r.eps);
          },
          [&](const QuickRule& r) { return quick_rule_bandwidth(s, kernel, r.level); },
          [&](const MaxSmoothRule& r) { return max_smoothing_bandwidth(s, kernel, r.level).h; },
          [&](const ConstrainedCvRule& r) {
            return constrained_cv_bandwidth(s, kernel, r.level);
          },
      },
      rule);
}

MaxSmoothResult max_smoothing_bandwidth(const Sample& s, const Kernel& kernel, double level,
                                        const MaxSmoothOptions& options) {
  require_spread(s, "max_smoothing_bandwidth");
  if (!(options.ratio > 0.0 && options.ratio < 1.0) ||
      !(options.lower_factor > 0.0 && options.lower_factor < options.upper_factor)) {
    throw std::invalid_argument("max_smoothing_bandwidth: invalid search options");
  }
  MaxSmoothResult result;
  result.c = ks_quantile(level);
  const double c = result.c;

  // Only the sign of g is needed while searching; each check starts next to
  // the last violation found, where a new one is most likely.
  double hint = s.quantile(0.5);
  auto admissible = [&](double h) {
    ++result.evaluations;
    const auto hit = z_max_exceeds(SmoothedEstimate(s, kernel, h), c, hint);
    if (hit) hint = *hit;
    return !hit;
  };

  const double h_max = options.upper_factor * s.sd();
  const double h_min = options.lower_factor * s.sd();

  double prev_h = h_max;
  bool prev_ok = admissible(h_max);
  result.admissible_at_upper_limit = prev_ok;
  if (!prev_ok || options.full_scan) {
    for (double h = h_max * options.ratio; h >= h_min; h *= options.ratio) {
      const bool ok = admissible(h);
      if (ok && !prev_ok) {
        result.brackets.push_back({h, prev_h});
        if (!options.full_scan) break;
      }
      prev_h = h;
      prev_ok = ok;
    }
  }

  if (result.admissible_at_upper_limit) {
    result.h = h_max;
  } else {
    if (result.brackets.empty()) throw std::runtime_error("no admissible bandwidth in range");
    double lo = result.brackets.front().admissible;
    double hi = result.brackets.front().inadmissible;
    while (hi - lo > options.rel_tol * lo) {
      const double mid = 0.5 * (lo + hi);
      if (admissible(mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    result.h = lo;
  }
  const ZMax at_h = z_max_abs(SmoothedEstimate(s, kernel, result.h));
  result.max_abs_z = at_h.value;
  result.argmax = at_h.location;
  return result;
}

double quick_rule_bandwidth(const Sample& s, const Kernel& kernel, double level) {
  require_spread(s, "quick_rule_bandwidth");
  const double c = ks_quantile(level);
  const double n = static_cast<double>(s.size());
  return std::sqrt(2.0 * c / kernel.moments().k2) / std::sqrt(normal_pdf(1.0)) * s.sd() /
         std::pow(n, 0.25);
}

double lscv_score(const Sample& s, const Kernel& kernel, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("lscv_score: h must be positive");
  const auto v = s.values();
  const std::size_t n = v.size();
  const double reach = std::max(kernel.self_convolution_radius(), kernel.window_radius()) * h;
  double conv = 0.0;  // sum over i < j of (k*k)(d)
  double loo = 0.0;   // sum over i < j of k(d)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n && v[j] - v[i] <= reach; ++j) {
      const double d = (v[j] - v[i]) / h;
      conv += kernel.self_convolution(d);
      loo += kernel.pdf(d);
    }
  }
  const double nn = static_cast<double>(n);
  const double integral_sq = (nn * kernel.self_convolution(0.0) + 2.0 * conv) / (nn * nn * h);
  const double leave_one_out = 2.0 * loo / ((nn - 1.0) * h);  // sum_i fhat_{-i}(X_i)
  return integral_sq - 2.0 / nn * leave_one_out;
}

CvCurve lscv_bandwidth(const Sample& s, const Kernel& kernel, std::span<const double> grid) {
  if (s.size() < 3) throw std::invalid_argument("lscv_bandwidth: need at least 3 observations");
  if (grid.empty()) throw std::invalid_argument("lscv_bandwidth: empty grid");
  if (!(s.sd() > 0.0)) throw std::invalid_argument("lscv_bandwidth: all-equal data");
  CvCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.score.reserve(grid.size());
  double best = 0.0;
  bool have_best = false;
  for (double h : grid) {
    const double score = lscv_score(s, kernel, h);
    curve.score.push_back(score);
    if (!have_best || score < best || (score == best && h < curve.h_star)) {
      best = score;
      curve.h_star = h;
      have_best = true;
    }
  }
  return curve;
}

std::vector<double> default_cv_grid(const Sample& s) {
  constexpr int kPoints = 60;
  const double lo = 1e-3 * s.sd();
  const double hi = 3.0 * s.sd();
  std::vector<double> grid(kPoints);
  for (int i = 0; i < kPoints; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (kPoints - 1));
  }
  return grid;
}

double constrained_cv_bandwidth(const Sample& s, const Kernel& kernel, double level,
                                std::span<const double> grid) {
  const double hhat = max_smoothing_bandwidth(s, kernel, level).h;
  std::vector<double> allowed;
  for (double h : grid) {
    if (h <= hhat) allowed.push_back(h);
  }
  allowed.push_back(hhat);
  return lscv_bandwidth(s, kernel, allowed).h_star;
}

double constrained_cv_bandwidth(const Sample& s, const Kernel& kernel, double level) {
  return constrained_cv_bandwidth(s, kernel, level, default_cv_grid(s));
}

double corrected_band_h1(const Sample& s, const Kernel& kernel) {
  require_spread(s, "corrected_band_h1");
  const AsymptoticContext reference(TestDensity::normal(0.0, s.sd()), kernel, s.sd(), 1.0);
  return optimal_h1(reference, static_cast<double>(s.size()));
}

double corrected_band_h2(const Sample& s) {
  require_spread(s, "corrected_band_h2");
  return s.sd() * std::pow(static_cast<double>(s.size()), -1.0 / 7.0);
}

}  // namespace kscdf
