#include "coarsetk/exact.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace coarsetk {

namespace {
constexpr i128 kI64Max = std::numeric_limits<i64>::max();
constexpr i128 kI64Min = std::numeric_limits<i64>::min();
}  // namespace

i64 narrow_checked(i128 v) {
  if (v > kI64Max || v < kI64Min) throw exact_range_error();
  return static_cast<i64>(v);
}

i128 mul_checked(i128 a, i128 b) {
  if (a == 0 || b == 0) return 0;
  i128 r = a * b;
  if (r / a != b) throw exact_range_error();
  // Guard the sign-overflow corner (-2^127) that division misses.
  if ((a > 0) == (b > 0) ? r < 0 : r > 0) throw exact_range_error();
  return r;
}

i64 pow_checked(i64 base, int exp) {
  if (base < 0 || exp < 0) throw exact_range_error();
  i128 r = 1;
  for (int i = 0; i < exp; ++i) r = mul_checked(r, base);
  return narrow_checked(r);
}

i64 isqrt_floor(i64 s) {
  if (s < 0) throw exact_range_error();
  if (s == 0) return 0;
  i64 r = static_cast<i64>(std::sqrt(static_cast<double>(s)));
  while (r > 0 && r > s / r) --r;
  while ((r + 1) <= s / (r + 1)) ++r;
  return r;
}

bool is_perfect_square(i64 s, i64* root) {
  i64 r = isqrt_floor(s);
  if (r * r == s) {
    if (root) *root = r;
    return true;
  }
  return false;
}

// ============================================================================
// Rat
// ============================================================================

Rat::Rat(i64 num, i64 den) : num_(num), den_(den) {
  if (den_ == 0) throw validation_error("zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  require_nonneg();
  i64 g = std::gcd(num_ < 0 ? -num_ : num_, den_);
  if (g > 1) {
    num_ /= g;
    den_ /= g;
  }
}

std::string Rat::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rat Rat::operator+(const Rat& o) const {
  i128 n = mul_checked(num_, o.den_) + mul_checked(o.num_, den_);
  i128 d = mul_checked(den_, o.den_);
  return Rat(narrow_checked(n), narrow_checked(d));
}

Rat Rat::operator-(const Rat& o) const {
  i128 n = mul_checked(num_, o.den_) - mul_checked(o.num_, den_);
  i128 d = mul_checked(den_, o.den_);
  return Rat(narrow_checked(n), narrow_checked(d));
}

Rat Rat::operator*(const Rat& o) const {
  i64 g1 = std::gcd(num_ < 0 ? -num_ : num_, o.den_);
  i64 g2 = std::gcd(o.num_ < 0 ? -o.num_ : o.num_, den_);
  i128 n = mul_checked(num_ / g1, o.num_ / g2);
  i128 d = mul_checked(den_ / g2, o.den_ / g1);
  return Rat(narrow_checked(n), narrow_checked(d));
}

Rat Rat::operator/(const Rat& o) const {
  if (o.num_ == 0) throw validation_error("division by zero scale");
  return *this * Rat(o.den_, o.num_);
}

// ============================================================================
// Dist
// ============================================================================

Dist Dist::integer(i64 v) {
  if (v < 0) throw validation_error("negative distance");
  Dist d;
  d.iv_ = v;
  i128 sq = static_cast<i128>(v) * v;
  d.sq_ = sq <= std::numeric_limits<i64>::max() ? static_cast<i64>(sq) : -1;
  d.is_int_ = true;
  return d;
}

Dist Dist::sqrt_of(i64 s) {
  if (s < 0) throw validation_error("negative squared distance");
  i64 r = 0;
  if (is_perfect_square(s, &r)) return integer(r);
  Dist d;
  d.sq_ = s;
  d.iv_ = 0;
  d.is_int_ = false;
  return d;
}

double Dist::approx() const {
  if (is_int_) return static_cast<double>(iv_);
  return std::sqrt(static_cast<double>(sq_));
}

std::string Dist::str() const {
  if (is_int_) return std::to_string(iv_);
  return "sqrt(" + std::to_string(sq_) + ")";
}

i64 Dist::ceil_int() const {
  if (is_int_) return iv_;
  return isqrt_floor(sq_) + 1;  // sq_ is not a perfect square here
}

i64 Dist::floor_int() const {
  if (is_int_) return iv_;
  return isqrt_floor(sq_);
}

Dist Dist::operator+(const Dist& o) const {
  return integer(narrow_checked(static_cast<i128>(int_value()) + o.int_value()));
}

Dist Dist::scaled(i64 k) const {
  if (k < 0) throw validation_error("negative distance scale factor");
  return integer(narrow_checked(mul_checked(k, int_value())));
}

std::strong_ordering Dist::compare(const Rat& q) const {
  if (is_int_) {
    // v <=> p/q  <=>  v*q <=> p
    i128 lhs = static_cast<i128>(iv_) * q.den();
    i128 rhs = q.num();
    return lhs < rhs ? std::strong_ordering::less
         : lhs > rhs ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
  }
  // value <=> p/q  <=>  value^2 * q.den^2 <=> p^2   (all nonnegative)
  i128 lhs = mul_checked(squared(), mul_checked(q.den(), q.den()));
  i128 rhs = mul_checked(q.num(), q.num());
  return lhs < rhs ? std::strong_ordering::less
       : lhs > rhs ? std::strong_ordering::greater
                   : std::strong_ordering::equal;
}

Rat Dist::ratio_upper(const Dist& num, const Dist& den, bool* exact) {
  if (den.is_zero()) throw validation_error("ratio with zero denominator");
  if (num.is_integer() && den.is_integer()) {
    if (exact) *exact = true;
    return Rat(num.int_value(), den.int_value());
  }
  if (exact) *exact = false;
  // ceil(num) / floor(den) bounds the ratio from above; floor(den) >= 1
  // because den > 0 and a nonzero distance is >= 1 on integer lattices,
  // but guard the general case.
  i64 d = den.floor_int();
  if (d == 0) throw exact_range_error();
  return Rat(num.ceil_int(), d);
}

bool Dist::ratio_le(const Dist& num1, const Dist& den1, const Dist& num2, const Dist& den2) {
  if (den1.is_zero() || den2.is_zero()) throw validation_error("ratio with zero denominator");
  // num1/den1 <= num2/den2  <=>  num1^2 * den2^2 <= num2^2 * den1^2
  i128 lhs = mul_checked(num1.squared(), den2.squared());
  i128 rhs = mul_checked(num2.squared(), den1.squared());
  return lhs <= rhs;
}

bool le_affine(const Dist& y, const Rat& c, const Dist& x, const Rat& u) {
  // y <= c*x + u with c = p/q, u = a/b  <=>  (q*b)*y <= (p*b)*x + (a*q).
  i128 A = mul_checked(c.den(), u.den());
  i128 B = mul_checked(c.num(), u.den());
  i128 C = mul_checked(u.num(), c.den());
  if (y.is_integer() && x.is_integer()) {
    return mul_checked(A, y.int_value()) <= mul_checked(B, x.int_value()) + C;
  }
  if (x.is_integer()) {
    // A*y <= B*x + C with only y irrational: square once.
    i128 rhs = mul_checked(B, x.int_value()) + C;
    if (rhs < 0) return false;
    return mul_checked(mul_checked(A, A), y.squared()) <= mul_checked(rhs, rhs);
  }
  // A*y <= B*x + C with y = sqrt(Y), x = sqrt(X). Two rounds of squaring,
  // with sign analysis so each squaring preserves the inequality.
  i128 lhs2 = mul_checked(mul_checked(A, A), y.squared());          // (A*y)^2
  i128 bx2 = mul_checked(mul_checked(B, B), x.squared());           // (B*x)^2
  i128 c2 = mul_checked(C, C);
  // Compare lhs2 against (B*x + C)^2 = bx2 + c2 + 2*C*(B*x).
  i128 rem = lhs2 - bx2 - c2;  // must be <= 2*C*B*x
  if (rem <= 0) return true;
  if (C == 0 || B == 0 || x.is_zero()) return false;
  // rem^2 <= 4*C^2*B^2*X, all positive
  i128 rem2 = mul_checked(rem, rem);
  i128 rhs2 = mul_checked(mul_checked(4, c2), mul_checked(mul_checked(B, B), x.squared()));
  return rem2 <= rhs2;
}

}  // namespace coarsetk
