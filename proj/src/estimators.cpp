#include "kscdf/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "kscdf/normal.hpp"

namespace kscdf {

namespace {

// Taylor order for the Gaussian cluster expansion. With offsets |delta| <= 1/2
// (in bandwidth units) the remainder is bounded by Cramer's inequality:
// |delta|^20 / 20! * max|He_19 phi| < 6e-17 per observation.
constexpr int kGaussianOrder = 20;
// K is a cubic on the Epanechnikov support, so order 4 is exact there.
constexpr int kEpanechnikovOrder = 4;

struct Cluster {
  std::size_t begin = 0;
  std::size_t end = 0;
  double center = 0.0;
  double lo = 0.0;  // smallest member
  double hi = 0.0;  // largest member
  // moment[k] = sum over members of delta^k / k!, delta = (X_i - center) / h.
  std::array<double, kGaussianOrder> moment{};
};

std::vector<Cluster> build_clusters(std::span<const double> v, double h, int order) {
  std::vector<Cluster> clusters;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] - v[i] <= h) ++j;
    Cluster c;
    c.begin = i;
    c.end = j;
    c.lo = v[i];
    c.hi = v[j - 1];
    c.center = 0.5 * (c.lo + c.hi);
    for (std::size_t t = i; t < j; ++t) {
      const double delta = (v[t] - c.center) / h;
      double term = 1.0;
      c.moment[0] += 1.0;
      for (int k = 1; k < order; ++k) {
        term *= delta / k;
        c.moment[k] += term;
      }
    }
    clusters.push_back(c);
    i = j;
  }
  return clusters;
}

// sum over cluster members of Phi(t - delta_i)
double gaussian_cluster_sum(const Cluster& c, double t) {
  double he_prev = 1.0;  // He_0
  double he = t;         // He_1
  double series = c.moment[1] * he_prev;
  for (int k = 2; k < kGaussianOrder; ++k) {
    series += c.moment[k] * he;
    const double next = t * he - (k - 1) * he_prev;
    he_prev = he;
    he = next;
  }
  return c.moment[0] * normal_cdf(t) - normal_pdf(t) * series;
}

// sum over cluster members of K(t - delta_i) with every argument inside (-1, 1).
double epanechnikov_cluster_sum(const Cluster& c, double t) {
  const double s1 = c.moment[1];
  const double s2 = 2.0 * c.moment[2];
  const double s3 = 6.0 * c.moment[3];
  const double m = c.moment[0];
  const double cubic = m * t * t * t - 3.0 * t * t * s1 + 3.0 * t * s2 - s3;
  return 0.5 * m + 0.75 * (m * t - s1) - 0.25 * cubic;
}

std::vector<double> direct_sweep(const SmoothedEstimate& e, std::span<const double> xs) {
  const auto v = e.sample().values();
  const double h = e.bandwidth();
  const double reach = e.kernel().window_radius() * h;
  const double n = static_cast<double>(v.size());
  std::vector<double> out(xs.size());
  std::size_t lo = std::lower_bound(v.begin(), v.end(), xs.front() - reach) - v.begin();
  std::size_t hi = lo;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    while (lo < v.size() && v[lo] < x - reach) ++lo;
    if (hi < lo) hi = lo;
    while (hi < v.size() && v[hi] <= x + reach) ++hi;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += e.kernel().cdf((x - v[i]) / h);
    out[j] = (static_cast<double>(lo) + sum) / n;
  }
  return out;
}

std::vector<double> cluster_sweep(const SmoothedEstimate& e, std::span<const double> xs,
                                  const std::vector<Cluster>& clusters) {
  const auto v = e.sample().values();
  const double h = e.bandwidth();
  const Kernel& kernel = e.kernel();
  const double r = kernel.window_radius();
  const double reach = r * h;
  const double n = static_cast<double>(v.size());
  std::vector<double> out(xs.size());
  // clusters before `first` are saturated at K = 1, those from `last` on contribute 0
  std::size_t first = std::partition_point(clusters.begin(), clusters.end(),
                                           [&](const Cluster& c) {
                                             return c.hi < xs.front() - reach;
                                           }) -
                      clusters.begin();
  std::size_t last = first;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double x = xs[j];
    while (first < clusters.size() && clusters[first].hi < x - reach) ++first;
    if (last < first) last = first;
    while (last < clusters.size() && clusters[last].lo <= x + reach) ++last;
    double sum = first < clusters.size() ? static_cast<double>(clusters[first].begin)
                                         : static_cast<double>(v.size());
    for (std::size_t b = first; b < last; ++b) {
      const Cluster& c = clusters[b];
      const double t = (x - c.center) / h;
      if (kernel.compact()) {
        const double umin = (x - c.hi) / h;
        const double umax = (x - c.lo) / h;
        if (umin > -1.0 && umax < 1.0) {
          sum += epanechnikov_cluster_sum(c, t);
        } else {
          for (std::size_t i = c.begin; i < c.end; ++i) sum += kernel.cdf((x - v[i]) / h);
        }
      } else {
        sum += gaussian_cluster_sum(c, t);
      }
    }
    out[j] = std::clamp(sum / n, 0.0, 1.0);
  }
  return out;
}

enum class SweepPath { direct, cluster };

struct SweepPlan {
  SweepPath path = SweepPath::direct;
  std::vector<Cluster> clusters;
};

// Picks the cheaper of the windowed and clustered sweeps for these targets.
SweepPlan plan_sweep(const SmoothedEstimate& e, std::span<const double> xs) {
  const auto v = e.sample().values();
  const double h = e.bandwidth();
  const double reach = e.kernel().window_radius() * h;
  SweepPlan plan;

  // Cost of the plain windowed sweep: kernel evaluations summed over targets.
  double direct_cost = 0.0;
  {
    std::size_t lo = 0, hi = 0;
    for (double x : xs) {
      while (lo < v.size() && v[lo] < x - reach) ++lo;
      if (hi < lo) hi = lo;
      while (hi < v.size() && v[hi] <= x + reach) ++hi;
      direct_cost += static_cast<double>(hi - lo);
    }
  }
  if (direct_cost < 64.0 * static_cast<double>(xs.size())) return plan;

  const int order = e.kernel().compact() ? kEpanechnikovOrder : kGaussianOrder;
  auto clusters = build_clusters(v, h, order);
  double cluster_cost = 0.0;
  {
    const double per_cluster = e.kernel().compact() ? 4.0 : kGaussianOrder + 6.0;
    std::size_t first = 0, last = 0;
    for (double x : xs) {
      while (first < clusters.size() && clusters[first].hi < x - reach) ++first;
      if (last < first) last = first;
      while (last < clusters.size() && clusters[last].lo <= x + reach) ++last;
      cluster_cost += per_cluster * static_cast<double>(last - first);
    }
  }
  if (cluster_cost >= direct_cost) return plan;
  plan.path = SweepPath::cluster;
  plan.clusters = std::move(clusters);
  return plan;
}

std::vector<double> run_sweep(const SmoothedEstimate& e, std::span<const double> xs,
                              const SweepPlan& plan) {
  if (xs.empty()) return {};
  return plan.path == SweepPath::direct ? direct_sweep(e, xs)
                                        : cluster_sweep(e, xs, plan.clusters);
}

JumpProfile jump_points(const SmoothedEstimate& e) {
  const auto v = e.sample().values();
  const double n = static_cast<double>(v.size());
  JumpProfile p;
  p.n = v.size();
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j < v.size() && v[j] == v[i]) ++j;
    p.points.push_back(v[i]);
    p.ecdf_left.push_back(static_cast<double>(i) / n);
    p.ecdf_at.push_back(static_cast<double>(j) / n);
    i = j;
  }
  return p;
}

}  // namespace

double ecdf_eval(const Sample& s, double x, Side side) {
  const auto v = s.values();
  const auto it = side == Side::at ? std::upper_bound(v.begin(), v.end(), x)
                                   : std::lower_bound(v.begin(), v.end(), x);
  return static_cast<double>(it - v.begin()) / static_cast<double>(v.size());
}

SmoothedEstimate::SmoothedEstimate(const Sample& sample, const Kernel& kernel, double h)
    : sample_(&sample), kernel_(kernel), h_(h) {
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("bandwidth must be positive and finite");
  }
}

double smoothed_cdf_eval(const SmoothedEstimate& e, double x) {
  const auto v = e.sample().values();
  const double h = e.bandwidth();
  const double reach = e.kernel().window_radius() * h;
  const auto lo = std::lower_bound(v.begin(), v.end(), x - reach);
  const auto hi = std::upper_bound(lo, v.end(), x + reach);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += e.kernel().cdf((x - *it) / h);
  return (static_cast<double>(lo - v.begin()) + sum) / static_cast<double>(v.size());
}

double kde_eval(const SmoothedEstimate& e, double x) {
  const auto v = e.sample().values();
  const double h = e.bandwidth();
  const double reach = e.kernel().window_radius() * h;
  const auto lo = std::lower_bound(v.begin(), v.end(), x - reach);
  const auto hi = std::upper_bound(lo, v.end(), x + reach);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += e.kernel().pdf((x - *it) / h);
  return sum / (static_cast<double>(v.size()) * h);
}

double kde_deriv_eval(const SmoothedEstimate& e, double x) {
  const auto v = e.sample().values();
  const double h = e.bandwidth();
  const double reach = e.kernel().window_radius() * h;
  const auto lo = std::lower_bound(v.begin(), v.end(), x - reach);
  const auto hi = std::upper_bound(lo, v.end(), x + reach);
  double sum = 0.0;
  for (auto it = lo; it != hi; ++it) sum += e.kernel().deriv((x - *it) / h);
  return sum / (static_cast<double>(v.size()) * h * h);
}

double z_process_eval(const SmoothedEstimate& e, double x, Side side) {
  const double n = static_cast<double>(e.sample().size());
  return std::sqrt(n) * (smoothed_cdf_eval(e, x) - ecdf_eval(e.sample(), x, side));
}

std::vector<double> smoothed_cdf_sorted(const SmoothedEstimate& e,
                                        std::span<const double> xs) {
  if (!std::is_sorted(xs.begin(), xs.end())) {
    throw std::invalid_argument("smoothed_cdf_sorted: evaluation points must be ascending");
  }
  return run_sweep(e, xs, plan_sweep(e, xs));
}

JumpProfile jump_profile(const SmoothedEstimate& e) {
  JumpProfile p = jump_points(e);
  p.smoothed = smoothed_cdf_sorted(e, p.points);
  return p;
}

std::optional<double> z_max_exceeds(const SmoothedEstimate& e, double c, double hint) {
  constexpr std::size_t kBlock = 1024;
  const JumpProfile p = jump_points(e);
  const SweepPlan plan = plan_sweep(e, p.points);
  const double root_n = std::sqrt(static_cast<double>(p.n));
  const std::span<const double> pts(p.points);

  auto check = [&](std::size_t lo, std::size_t hi) -> std::optional<double> {
    const auto values = run_sweep(e, pts.subspan(lo, hi - lo), plan);
    for (std::size_t k = lo; k < hi; ++k) {
      const double f = values[k - lo];
      if (std::abs(root_n * (f - p.ecdf_left[k])) >= c ||
          std::abs(root_n * (f - p.ecdf_at[k])) >= c) {
        return p.points[k];
      }
    }
    return std::nullopt;
  };

  const std::size_t m = pts.size();
  const std::size_t at = std::min<std::size_t>(
      std::lower_bound(pts.begin(), pts.end(), hint) - pts.begin(), m - 1);
  const std::size_t lo = at > kBlock / 2 ? at - kBlock / 2 : 0;
  const std::size_t hi = std::min(m, lo + kBlock);
  if (auto hit = check(lo, hi)) return hit;
  for (std::size_t a = hi; a < m; a += kBlock) {
    if (auto hit = check(a, std::min(m, a + kBlock))) return hit;
  }
  for (std::size_t b = lo; b > 0; b -= std::min(b, kBlock)) {
    if (auto hit = check(b - std::min(b, kBlock), b)) return hit;
  }
  return std::nullopt;
}

ZMax z_max_abs(const JumpProfile& p) {
  const double root_n = std::sqrt(static_cast<double>(p.n));
  ZMax best;
  best.value = -1.0;
  for (std::size_t k = 0; k < p.points.size(); ++k) {
    const double z_left = std::abs(root_n * (p.smoothed[k] - p.ecdf_left[k]));
    const double z_at = std::abs(root_n * (p.smoothed[k] - p.ecdf_at[k]));
    if (z_left > best.value) best = {z_left, p.points[k], Side::left};
    if (z_at > best.value) best = {z_at, p.points[k], Side::at};
  }
  return best;
}

ZMax z_max_abs(const SmoothedEstimate& e) { return z_max_abs(jump_profile(e)); }

}  // namespace kscdf
