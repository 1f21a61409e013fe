#pragma once

#include <cstddef>
#include <string>
#include <variant>

#include "kscdf/rng.hpp"
#include "kscdf/sample.hpp"

namespace kscdf {

enum class DensityFn { pdf, cdf, deriv };

struct NormalDensity {
  double mu = 0.0;
  double sigma = 1.0;
};

struct UniformDensity {
  double a = 0.0;
  double b = 1.0;
};

// w * N(mu1, s1^2) + (1 - w) * N(mu2, s2^2)
struct NormalMixtureDensity {
  double w = 0.5;
  double mu1 = -1.0;
  double s1 = 0.5;
  double mu2 = 1.0;
  double s2 = 0.5;
};

struct DerivPeak {
  double value;     // max_x |f'(x)|
  double location;  // an x attaining it
};

// Analytic test density: exact pdf, cdf, derivatives and a sampler.
class TestDensity {
 public:
  using Params = std::variant<NormalDensity, UniformDensity, NormalMixtureDensity>;

  // Validates parameters (positive scales, a < b, 0 < w < 1).
  explicit TestDensity(Params params);

  static TestDensity std_normal() { return TestDensity(NormalDensity{}); }
  static TestDensity normal(double mu, double sigma) {
    return TestDensity(NormalDensity{mu, sigma});
  }
  static TestDensity uniform(double a, double b) { return TestDensity(UniformDensity{a, b}); }
  static TestDensity mixture(double w, double mu1, double s1, double mu2, double s2) {
    return TestDensity(NormalMixtureDensity{w, mu1, s1, mu2, s2});
  }

  const Params& params() const { return params_; }
  std::string name() const;
  // Round-trippable description, e.g. "normal:mu=0,sigma=1".
  std::string describe() const;

  double pdf(double x) const;
  double cdf(double x) const;
  double deriv(double x) const;
  bool has_second_deriv() const;
  // Throws std::domain_error when has_second_deriv() is false.
  double second_deriv(double x) const;

  double mean() const;
  double stddev() const;

  // One draw by inverse-cdf; mixtures consume two uniforms per draw.
  double draw(RngStream& rng) const;

 private:
  Params params_;
};

double density_eval(const TestDensity& d, double x, DensityFn which);

// n i.i.d. draws, sorted. Throws std::invalid_argument("empty sample") for n = 0.
Sample sample(const TestDensity& d, std::size_t n, RngStream& rng);

// max_x |f'(x)| and a maximizer. Closed form for normals; dense grid plus
// golden-section refinement for mixtures. Throws std::domain_error for the
// uniform, whose derivative is unbounded at the edges.
DerivPeak sup_abs_deriv(const TestDensity& d);

}  // namespace kscdf
