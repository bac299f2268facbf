#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "had/types.hpp"

namespace had {

// Strictly increasing scalar function stored as a dense sample table on a
// uniform grid. All deformations flow through this one representation:
// evaluation and inversion are linear interpolation on the table, so the
// function class is closed under the operations the transforms need.
class MonotoneMap {
 public:
  static constexpr std::size_t kDefaultSamples = 4096;

  MonotoneMap() = default;

  // Table of samples at uniform positions over `domain`; at least 2 entries.
  static MonotoneMap from_table(std::vector<double> values, Interval domain);
  static MonotoneMap sample(const std::function<double(double)>& fn, Interval domain,
                            std::size_t samples = kDefaultSamples);
  static MonotoneMap identity(Interval domain, std::size_t samples = kDefaultSamples);

  bool strictly_increasing() const;
  void require_increasing(const char* what) const;

  // Linear interpolation; x is clamped into the domain.
  double operator()(double x) const;

  // Generalized inverse: the t with value(t) == y, y clamped into the range.
  double inverse_at(double y) const;

  // Inverse function resampled as a table on [front(), back()].
  MonotoneMap inverse(std::size_t samples = kDefaultSamples) const;

  const std::vector<double>& table() const { return values_; }
  Interval domain() const { return domain_; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

 private:
  std::vector<double> values_;
  Interval domain_{0.0, 1.0};
};

}  // namespace had
