#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace kscdf {

// Sorted observations with cached summary statistics.
class Sample {
 public:
  // Sorts the values. Throws std::invalid_argument("empty sample") when
  // `values` is empty and on non-finite entries.
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  double mean() const { return mean_; }
  // Standard deviation with divisor n - 1; zero for n = 1.
  double sd() const { return sd_; }

  // Linear-interpolation sample quantile (R type 7).
  double quantile(double p) const;

 private:
  std::vector<double> values_;
  double mean_ = 0.0;
  double sd_ = 0.0;
};

}  // namespace kscdf
