#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ara::baid {

// Either a closed real interval or a finite set of values. Consecutive
// integer ranges are kept implicit so that Θ₂'s 180001 outcomes cost nothing.
class Domain {
 public:
  static Domain interval(double lo, double hi);
  static Domain discrete(std::vector<double> values);
  static Domain integers(std::int64_t lo, std::int64_t hi);

  bool is_interval() const { return kind_ == Kind::interval; }
  bool is_discrete() const { return kind_ != Kind::interval; }
  bool is_integer_range() const { return kind_ == Kind::integers; }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double width() const { return hi_ - lo_; }

  // Discrete only.
  std::size_t size() const;
  double value(std::size_t i) const;
  std::optional<std::size_t> index_of(double x) const;
  std::vector<double> values() const;

  bool contains(double x, double tol = 1e-12) const;

  bool operator==(const Domain& o) const;

 private:
  enum class Kind { interval, values, integers };
  Kind kind_ = Kind::interval;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> values_;
};

}  // namespace ara::baid
