#include "ara/baid/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ara/core/errors.hpp"

namespace ara::baid {

Domain Domain::interval(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw StructuralError("interval domain needs finite lo < hi");
  Domain d;
  d.kind_ = Kind::interval;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

Domain Domain::discrete(std::vector<double> values) {
  if (values.empty()) throw StructuralError("discrete domain is empty");
  std::set<double> seen;
  for (double v : values) {
    if (!std::isfinite(v)) throw StructuralError("discrete domain has a non-finite value");
    if (!seen.insert(v).second) throw StructuralError("discrete domain has duplicate values");
  }
  Domain d;
  d.kind_ = Kind::values;
  d.lo_ = *std::min_element(values.begin(), values.end());
  d.hi_ = *std::max_element(values.begin(), values.end());
  d.values_ = std::move(values);
  return d;
}

Domain Domain::integers(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw StructuralError("integer domain needs lo <= hi");
  Domain d;
  d.kind_ = Kind::integers;
  d.lo_ = static_cast<double>(lo);
  d.hi_ = static_cast<double>(hi);
  return d;
}

std::size_t Domain::size() const {
  switch (kind_) {
    case Kind::values: return values_.size();
    case Kind::integers: return static_cast<std::size_t>(hi_ - lo_) + 1;
    default: throw std::logic_error("size() on an interval domain");
  }
}

double Domain::value(std::size_t i) const {
  if (kind_ == Kind::values) return values_.at(i);
  if (kind_ == Kind::integers) return lo_ + static_cast<double>(i);
  throw std::logic_error("value() on an interval domain");
}

std::optional<std::size_t> Domain::index_of(double x) const {
  if (kind_ == Kind::values) {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (std::abs(values_[i] - x) <= 1e-12 * std::max(1.0, std::abs(x))) return i;
    return std::nullopt;
  }
  if (kind_ == Kind::integers) {
    const double r = std::round(x);
    if (std::abs(r - x) > 1e-9 || r < lo_ || r > hi_) return std::nullopt;
    return static_cast<std::size_t>(r - lo_);
  }
  throw std::logic_error("index_of() on an interval domain");
}

std::vector<double> Domain::values() const {
  if (kind_ == Kind::values) return values_;
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = value(i);
  return out;
}

bool Domain::contains(double x, double tol) const {
  if (kind_ == Kind::interval) return x >= lo_ - tol && x <= hi_ + tol;
  return index_of(x).has_value();
}

bool Domain::operator==(const Domain& o) const {
  if (is_interval() != o.is_interval()) return false;
  if (is_interval()) return lo_ == o.lo_ && hi_ == o.hi_;
  if (size() != o.size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (value(i) != o.value(i)) return false;
  return true;
}

}  // namespace ara::baid
