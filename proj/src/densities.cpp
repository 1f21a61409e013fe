#include "kscdf/densities.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "kscdf/normal.hpp"

namespace kscdf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double normal_density(double x, double mu, double s) { return normal_pdf((x - mu) / s) / s; }

double normal_density_deriv(double x, double mu, double s) {
  const double z = (x - mu) / s;
  return -z * normal_pdf(z) / (s * s);
}

double normal_density_deriv2(double x, double mu, double s) {
  const double z = (x - mu) / s;
  return (z * z - 1.0) * normal_pdf(z) / (s * s * s);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

TestDensity::TestDensity(Params params) : params_(params) {
  std::visit(Overloaded{
                 [](const NormalDensity& p) {
                   if (!(p.sigma > 0.0) || !std::isfinite(p.mu) || !std::isfinite(p.sigma))
                     throw std::invalid_argument("normal density: sigma must be positive");
                 },
                 [](const UniformDensity& p) {
                   if (!(p.a < p.b) || !std::isfinite(p.a) || !std::isfinite(p.b))
                     throw std::invalid_argument("uniform density: require a < b");
                 },
                 [](const NormalMixtureDensity& p) {
                   if (!(p.w > 0.0 && p.w < 1.0))
                     throw std::invalid_argument("mixture density: weight must be in (0, 1)");
                   if (!(p.s1 > 0.0 && p.s2 > 0.0))
                     throw std::invalid_argument("mixture density: scales must be positive");
                 },
             },
             params_);
}

std::string TestDensity::name() const {
  return std::visit(Overloaded{
                        [](const NormalDensity&) { return std::string("normal"); },
                        [](const UniformDensity&) { return std::string("uniform"); },
                        [](const NormalMixtureDensity&) { return std::string("mixture"); },
                    },
                    params_);
}

std::string TestDensity::describe() const {
  return std::visit(
      Overloaded{
          [](const NormalDensity& p) {
            return "normal:mu=" + fmt(p.mu) + ",sigma=" + fmt(p.sigma);
          },
          [](const UniformDensity& p) { return "uniform:a=" + fmt(p.a) + ",b=" + fmt(p.b); },
          [](const NormalMixtureDensity& p) {
            return "mixture:w=" + fmt(p.w) + ",mu1=" + fmt(p.mu1) + ",s1=" + fmt(p.s1) +
                   ",mu2=" + fmt(p.mu2) + ",s2=" + fmt(p.s2);
          },
      },
      params_);
}

double TestDensity::pdf(double x) const {
  return std::visit(Overloaded{
                        [x](const NormalDensity& p) { return normal_density(x, p.mu, p.sigma); },
                        [x](const UniformDensity& p) {
                          return (x >= p.a && x <= p.b) ? 1.0 / (p.b - p.a) : 0.0;
                        },
                        [x](const NormalMixtureDensity& p) {
                          return p.w * normal_density(x, p.mu1, p.s1) +
                                 (1.0 - p.w) * normal_density(x, p.mu2, p.s2);
                        },
                    },
                    params_);
}

double TestDensity::cdf(double x) const {
  return std::visit(Overloaded{
                        [x](const NormalDensity& p) { return normal_cdf((x - p.mu) / p.sigma); },
                        [x](const UniformDensity& p) {
                          if (x <= p.a) return 0.0;
                          if (x >= p.b) return 1.0;
                          return (x - p.a) / (p.b - p.a);
                        },
                        [x](const NormalMixtureDensity& p) {
                          return p.w * normal_cdf((x - p.mu1) / p.s1) +
                                 (1.0 - p.w) * normal_cdf((x - p.mu2) / p.s2);
                        },
                    },
                    params_);
}

double TestDensity::deriv(double x) const {
  return std::visit(Overloaded{
                        [x](const NormalDensity& p) {
                          return normal_density_deriv(x, p.mu, p.sigma);
                        },
                        // Zero almost everywhere; the jumps at a and b are not represented.
                        [](const UniformDensity&) { return 0.0; },
                        [x](const NormalMixtureDensity& p) {
                          return p.w * normal_density_deriv(x, p.mu1, p.s1) +
                                 (1.0 - p.w) * normal_density_deriv(x, p.mu2, p.s2);
                        },
                    },
                    params_);
}

bool TestDensity::has_second_deriv() const {
  return !std::holds_alternative<UniformDensity>(params_);
}

double TestDensity::second_deriv(double x) const {
  return std::visit(Overloaded{
                        [x](const NormalDensity& p) {
                          return normal_density_deriv2(x, p.mu, p.sigma);
                        },
                        [](const UniformDensity&) -> double {
                          throw std::domain_error(
                              "uniform density has no second derivative at its edges");
                        },
                        [x](const NormalMixtureDensity& p) {
                          return p.w * normal_density_deriv2(x, p.mu1, p.s1) +
                                 (1.0 - p.w) * normal_density_deriv2(x, p.mu2, p.s2);
                        },
                    },
                    params_);
}

double TestDensity::mean() const {
  return std::visit(Overloaded{
                        [](const NormalDensity& p) { return p.mu; },
                        [](const UniformDensity& p) { return 0.5 * (p.a + p.b); },
                        [](const NormalMixtureDensity& p) {
                          return p.w * p.mu1 + (1.0 - p.w) * p.mu2;
                        },
                    },
                    params_);
}

double TestDensity::stddev() const {
  return std::visit(Overloaded{
                        [](const NormalDensity& p) { return p.sigma; },
                        [](const UniformDensity& p) { return (p.b - p.a) / std::sqrt(12.0); },
                        [this](const NormalMixtureDensity& p) {
                          const double m = mean();
                          const double second = p.w * (p.s1 * p.s1 + p.mu1 * p.mu1) +
                                                (1.0 - p.w) * (p.s2 * p.s2 + p.mu2 * p.mu2);
                          return std::sqrt(second - m * m);
                        },
                    },
                    params_);
}

double TestDensity::draw(RngStream& rng) const {
  return std::visit(Overloaded{
                        [&rng](const NormalDensity& p) {
                          return p.mu + p.sigma * normal_quantile(rng.next_uniform());
                        },
                        [&rng](const UniformDensity& p) {
                          return p.a + (p.b - p.a) * rng.next_uniform();
                        },
                        [&rng](const NormalMixtureDensity& p) {
                          const double pick = rng.next_uniform();
                          const double z = normal_quantile(rng.next_uniform());
                          return pick < p.w ? p.mu1 + p.s1 * z : p.mu2 + p.s2 * z;
                        },
                    },
                    params_);
}

double density_eval(const TestDensity& d, double x, DensityFn which) {
  switch (which) {
    case DensityFn::pdf:
      return d.pdf(x);
    case DensityFn::cdf:
      return d.cdf(x);
    case DensityFn::deriv:
      return d.deriv(x);
  }
  return 0.0;
}

Sample sample(const TestDensity& d, std::size_t n, RngStream& rng) {
  if (n == 0) throw std::invalid_argument("empty sample");
  std::vector<double> values(n);
  for (auto& v : values) v = d.draw(rng);
  return Sample(std::move(values));
}

DerivPeak sup_abs_deriv(const TestDensity& d) {
  return std::visit(
      Overloaded{
          [](const NormalDensity& p) {
            // |f'| = |z| phi(z) / sigma^2 peaks at |z| = 1.
            return DerivPeak{normal_pdf(1.0) / (p.sigma * p.sigma), p.mu + p.sigma};
          },
          [](const UniformDensity&) -> DerivPeak {
            throw std::domain_error("uniform density has an unbounded derivative");
          },
          [&d](const NormalMixtureDensity& p) {
            const double smax = std::max(p.s1, p.s2);
            const double lo = std::min(p.mu1, p.mu2) - 6.0 * smax;
            const double hi = std::max(p.mu1, p.mu2) + 6.0 * smax;
            constexpr int kGrid = 20000;
            const double step = (hi - lo) / kGrid;
            auto g = [&d](double x) { return std::abs(d.deriv(x)); };
            int best = 0;
            double best_value = -1.0;
            for (int i = 0; i <= kGrid; ++i) {
              const double v = g(lo + step * i);
              if (v > best_value) {
                best_value = v;
                best = i;
              }
            }
            // Golden-section maximization on the bracketing grid cell pair.
            const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = lo + step * (best - 1);
            double b = lo + step * (best + 1);
            double c = b - inv_phi * (b - a);
            double e = a + inv_phi * (b - a);
            double gc = g(c);
            double ge = g(e);
            while (b - a > 1e-12 * std::max(1.0, std::abs(a))) {
              if (gc > ge) {
                b = e;
                e = c;
                ge = gc;
                c = b - inv_phi * (b - a);
                gc = g(c);
              } else {
                a = c;
                c = e;
                gc = ge;
                e = a + inv_phi * (b - a);
                ge = g(e);
              }
            }
            const double x0 = 0.5 * (a + b);
            return DerivPeak{g(x0), x0};
          },
      },
      d.params());
}

}  // namespace kscdf
