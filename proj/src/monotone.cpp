#include "had/monotone.hpp"

#include <algorithm>
#include <cmath>

namespace had {

MonotoneMap MonotoneMap::from_table(std::vector<double> values, Interval domain) {
  require(values.size() >= 2, Errc::InvalidArgument,
          "monotone table needs at least 2 samples");
  require(domain.width() > 0.0, Errc::InvalidArgument,
          "monotone table domain has non-positive width");
  for (double v : values) {
    require(std::isfinite(v), Errc::NonFinite, "monotone table entry");
  }
  MonotoneMap m;
  m.values_ = std::move(values);
  m.domain_ = domain;
  return m;
}

MonotoneMap MonotoneMap::sample(const std::function<double(double)>& fn, Interval domain,
                                std::size_t samples) {
  require(samples >= 2, Errc::InvalidArgument, "need at least 2 samples");
  std::vector<double> values(samples);
  const double step = domain.width() / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = (i + 1 == samples) ? domain.hi : domain.lo + step * i;
    values[i] = fn(x);
  }
  return from_table(std::move(values), domain);
}

MonotoneMap MonotoneMap::identity(Interval domain, std::size_t samples) {
  return sample([](double x) { return x; }, domain, samples);
}

bool MonotoneMap::strictly_increasing() const {
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] > values_[i - 1])) return false;
  }
  return !values_.empty();
}

void MonotoneMap::require_increasing(const char* what) const {
  require(!values_.empty(), Errc::NotIncreasing, std::string(what) + ": empty table");
  for (std::size_t i = 1; i < values_.size(); ++i) {
    if (!(values_[i] > values_[i - 1])) {
      fail(Errc::NotIncreasing,
           std::string(what) + ": non-increasing step at table index " + std::to_string(i));
    }
  }
}

double MonotoneMap::operator()(double x) const {
  const double step = domain_.width() / static_cast<double>(values_.size() - 1);
  if (x <= domain_.lo) return values_.front();
  if (x >= domain_.hi) return values_.back();
  double u = (x - domain_.lo) / step;
  std::size_t idx = static_cast<std::size_t>(u);
  if (idx >= values_.size() - 1) idx = values_.size() - 2;
  const double frac = u - static_cast<double>(idx);
  return values_[idx] + frac * (values_[idx + 1] - values_[idx]);
}

double MonotoneMap::inverse_at(double y) const {
  if (y <= values_.front()) return domain_.lo;
  if (y >= values_.back()) return domain_.hi;
  // first index with value >= y; y is strictly inside the range here
  const auto it = std::lower_bound(values_.begin(), values_.end(), y);
  const std::size_t idx = static_cast<std::size_t>(it - values_.begin());
  const double step = domain_.width() / static_cast<double>(values_.size() - 1);
  if (idx == 0) return domain_.lo;
  const double v0 = values_[idx - 1];
  const double v1 = values_[idx];
  double frac = (v1 > v0) ? (y - v0) / (v1 - v0) : 0.0;
  frac = std::clamp(frac, 0.0, 1.0);
  return domain_.lo + step * (static_cast<double>(idx - 1) + frac);
}

MonotoneMap MonotoneMap::inverse(std::size_t samples) const {
  require_increasing("inverse");
  const Interval range{values_.front(), values_.back()};
  require(samples >= 2, Errc::InvalidArgument, "need at least 2 samples");
  std::vector<double> values(samples);
  const double step = range.width() / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    const double y = (i + 1 == samples) ? range.hi : range.lo + step * i;
    values[i] = inverse_at(y);
  }
  return from_table(std::move(values), range);
}

}  // namespace had
