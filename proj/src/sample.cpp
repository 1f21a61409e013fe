#include "kscdf/sample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kscdf {

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("empty sample");
  for (double v : values_) {
    if (!std::isfinite(v)) throw std::invalid_argument("sample contains a non-finite value");
  }
  std::sort(values_.begin(), values_.end());

  // Two-pass with compensation keeps the variance exact for shifted data.
  double sum = 0.0;
  for (double v : values_) sum += v;
  mean_ = sum / static_cast<double>(values_.size());
  if (values_.size() > 1) {
    double ss = 0.0;
    double comp = 0.0;
    for (double v : values_) {
      const double d = v - mean_;
      ss += d * d;
      comp += d;
    }
    const double n = static_cast<double>(values_.size());
    sd_ = std::sqrt(std::max(0.0, (ss - comp * comp / n) / (n - 1.0)));
  }
}

double Sample::quantile(double p) const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
  const double pos = p * static_cast<double>(values_.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values_.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values_[lo] + frac * (values_[hi] - values_[lo]);
}

}  // namespace kscdf
