#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace coarsetk {

using i64 = std::int64_t;
using i128 = __int128;

/// Thrown when an exact computation would overflow the integer range.
/// The toolkit never falls back to floating point silently.
class exact_range_error : public std::runtime_error {
public:
  exact_range_error() : std::runtime_error("exact-arithmetic range exceeded") {}
};

/// Thrown on malformed inputs (bad metric, bad cover, id mismatch, ...).
class validation_error : public std::runtime_error {
public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown when a computation exceeds its work budget and no fallback
/// (sampled bound, certificate mode) was requested by the caller.
class budget_error : public std::runtime_error {
public:
  explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

i64 narrow_checked(i128 v);
i128 mul_checked(i128 a, i128 b);
i64 pow_checked(i64 base, int exp);
i64 isqrt_floor(i64 s);
bool is_perfect_square(i64 s, i64* root);

// ============================================================================
// Rat: exact rational scale value
// ============================================================================

/// Nonnegative rational number with 64-bit numerator/denominator, normalized.
/// Used for scale thresholds and fitted constants; all comparisons are exact.
class Rat {
public:
  Rat() : num_(0), den_(1) {}
  Rat(i64 v) : num_(v), den_(1) { require_nonneg(); }
  Rat(i64 num, i64 den);

  i64 num() const { return num_; }
  i64 den() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }

  i64 floor() const { return num_ / den_; }
  i64 ceil() const { return (num_ + den_ - 1) / den_; }
  double approx() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string str() const;

  Rat operator+(const Rat& o) const;
  Rat operator-(const Rat& o) const;  // throws if result would be negative
  Rat operator*(const Rat& o) const;
  Rat operator/(const Rat& o) const;

  std::strong_ordering operator<=>(const Rat& o) const {
    i128 lhs = static_cast<i128>(num_) * o.den_;
    i128 rhs = static_cast<i128>(o.num_) * den_;
    return lhs < rhs ? std::strong_ordering::less
         : lhs > rhs ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
  }
  bool operator==(const Rat& o) const { return num_ == o.num_ && den_ == o.den_; }

private:
  void require_nonneg() const {
    if (num_ < 0) throw validation_error("negative scale value");
  }
  i64 num_;
  i64 den_;
};

// ============================================================================
// Dist: exact distance value
// ============================================================================

/// Exact nonnegative distance: either an integer or the square root of an
/// integer (Euclidean lattice geometry). Stored as the squared value plus an
/// integer shortcut when the value is an exact integer; every comparison,
/// including against rational thresholds and affine bounds, is integral.
class Dist {
public:
  Dist() : sq_(0), iv_(0), is_int_(true) {}

  static Dist integer(i64 v);
  static Dist sqrt_of(i64 s);

  bool is_integer() const { return is_int_; }
  /// Integer value; throws for irrational values.
  i64 int_value() const {
    if (!is_int_) throw exact_range_error();
    return iv_;
  }
  /// Squared value (always an exact integer); throws if out of i64 range.
  i64 squared() const {
    if (sq_ < 0) throw exact_range_error();
    return sq_;
  }
  bool is_zero() const { return is_int_ ? iv_ == 0 : sq_ == 0; }
  double approx() const;
  std::string str() const;

  /// Least integer >= value.
  i64 ceil_int() const;
  /// Greatest integer <= value.
  i64 floor_int() const;

  /// Sum, defined for integer-valued distances only.
  Dist operator+(const Dist& o) const;
  Dist scaled(i64 k) const;  // k * value, integer-valued distances only

  std::strong_ordering operator<=>(const Dist& o) const {
    if (is_int_ && o.is_int_)
      return iv_ < o.iv_ ? std::strong_ordering::less
           : iv_ > o.iv_ ? std::strong_ordering::greater
                         : std::strong_ordering::equal;
    i64 a = squared(), b = o.squared();
    return a < b ? std::strong_ordering::less
         : a > b ? std::strong_ordering::greater
                 : std::strong_ordering::equal;
  }
  bool operator==(const Dist& o) const { return (*this <=> o) == 0; }

  std::strong_ordering compare(const Rat& q) const;
  bool operator<=(const Rat& q) const { return compare(q) <= 0; }
  bool operator<(const Rat& q) const { return compare(q) < 0; }
  bool operator>(const Rat& q) const { return compare(q) > 0; }
  bool operator>=(const Rat& q) const { return compare(q) >= 0; }

  /// Exact ratio of two distances as a rational upper bound. For a pair of
  /// integer distances this is exact; otherwise it is the least rational
  /// p/q bound derived from integer ceilings, flagged via `exact`.
  static Rat ratio_upper(const Dist& num, const Dist& den, bool* exact);

  /// Exact test of num1/den1 <= num2/den2 (den1, den2 nonzero).
  static bool ratio_le(const Dist& num1, const Dist& den1, const Dist& num2, const Dist& den2);

private:
  i64 sq_;      // squared value, or -1 when it does not fit in i64
  i64 iv_;      // integer value when is_int_
  bool is_int_;
};

/// Exact test of y <= c*x + u for distances y, x and rational c, u >= 0.
bool le_affine(const Dist& y, const Rat& c, const Dist& x, const Rat& u);

}  // namespace coarsetk
