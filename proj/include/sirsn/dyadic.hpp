// Exact dyadic-rational scalars and the height/peak machinery of the
// binary hierarchy lattice.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace sirsn {

// Thrown when a fixed-width coordinate computation would overflow.
struct ArithmeticOverflow : std::overflow_error {
  using std::overflow_error::overflow_error;
};

inline int64_t checked_shl(int64_t m, int shift) {
  if (m == 0) return 0;
  if (shift < 0 || shift > 62) throw ArithmeticOverflow("shift out of range");
  int64_t a = std::abs(m);
  if (a > (std::numeric_limits<int64_t>::max() >> shift))
    throw ArithmeticOverflow("mantissa shift overflow");
  return m << shift;
}

inline int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("add overflow");
  return r;
}

inline int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("mul overflow");
  return r;
}

// Height of a nonzero integer: the exponent j with n = (2k+1)*2^j.
inline int height_of_int(int64_t n) {
  if (n == 0) throw std::invalid_argument("height_of_int(0) is infinite");
  return std::countr_zero(static_cast<uint64_t>(std::abs(n)));
}

constexpr int kInfiniteHeight = std::numeric_limits<int32_t>::max();

// Height as a value: finite exponent, or kInfiniteHeight for 0.
struct HeightValue {
  int32_t v = 0;
  bool infinite() const { return v == kInfiniteHeight; }
  friend bool operator==(HeightValue a, HeightValue b) { return a.v == b.v; }
  friend auto operator<=>(HeightValue a, HeightValue b) { return a.v <=> b.v; }
};

// The unique integer of maximal height in [m1, m2].
inline int64_t peak_int(int64_t m1, int64_t m2) {
  if (m1 > m2) throw std::invalid_argument("peak: empty interval");
  if (m1 <= 0 && 0 <= m2) return 0;
  bool neg = m2 < 0;
  int64_t a = neg ? -m2 : m1;
  int64_t b = neg ? -m1 : m2;
  // Largest k with a multiple of 2^k in [a, b]; that multiple is unique.
  for (int k = 62; k >= 0; --k) {
    int64_t step = int64_t{1} << k;
    int64_t q = (a + step - 1) >> k;  // ceil(a / 2^k), a > 0
    if (q * step <= b) {
      int64_t r = q * step;
      return neg ? -r : r;
    }
  }
  return m1;  // unreachable
}

// value = mantissa * 2^level; canonical form has odd mantissa, or
// mantissa == 0 with level == 0.  Canonical forms are unique per value.
struct DyadicScalar {
  int64_t mantissa = 0;
  int32_t level = 0;

  DyadicScalar() = default;
  DyadicScalar(int64_t m, int32_t lvl) : mantissa(m), level(lvl) { canonicalize(); }
  static DyadicScalar from_int(int64_t n) { return DyadicScalar(n, 0); }

  void canonicalize() {
    if (mantissa == 0) {
      level = 0;
      return;
    }
    int tz = std::countr_zero(static_cast<uint64_t>(std::abs(mantissa)));
    mantissa >>= tz;
    level += tz;
  }

  bool is_zero() const { return mantissa == 0; }

  // Height: level of the canonical form; infinite for zero.
  HeightValue height() const {
    if (mantissa == 0) return {kInfiniteHeight};
    return {level};
  }

  double to_double() const { return std::ldexp(static_cast<double>(mantissa), level); }

  // Integer index on the lattice of spacing 2^at_level.  Exact; throws if
  // the value does not lie on that lattice or does not fit.
  int64_t index_at(int32_t at_level) const {
    if (mantissa == 0) return 0;
    if (level < at_level) throw std::invalid_argument("value below lattice resolution");
    return checked_shl(mantissa, level - at_level);
  }
  bool on_lattice(int32_t at_level) const { return mantissa == 0 || level >= at_level; }

  static DyadicScalar at_index(int64_t index, int32_t at_level) {
    return DyadicScalar(index, at_level);
  }

  DyadicScalar operator-() const { return DyadicScalar(-mantissa, level); }

  friend DyadicScalar operator+(const DyadicScalar& a, const DyadicScalar& b) {
    if (a.mantissa == 0) return b;
    if (b.mantissa == 0) return a;
    int32_t l = std::min(a.level, b.level);
    int64_t m = checked_add(checked_shl(a.mantissa, a.level - l),
                            checked_shl(b.mantissa, b.level - l));
    return DyadicScalar(m, l);
  }
  friend DyadicScalar operator-(const DyadicScalar& a, const DyadicScalar& b) {
    return a + (-b);
  }

  DyadicScalar doubled() const {
    if (mantissa == 0) return *this;
    return DyadicScalar(mantissa, level + 1);
  }
  DyadicScalar halved() const {
    if (mantissa == 0) return *this;
    return DyadicScalar(mantissa, level - 1);
  }

  DyadicScalar abs() const { return DyadicScalar(std::abs(mantissa), level); }

  friend bool operator==(const DyadicScalar& a, const DyadicScalar& b) {
    return a.mantissa == b.mantissa && a.level == b.level;
  }
  friend bool operator<(const DyadicScalar& a, const DyadicScalar& b) {
    if (a.mantissa == 0 || b.mantissa == 0) {
      if (a.mantissa == b.mantissa) return false;
      return a.mantissa < b.mantissa;
    }
    if ((a.mantissa < 0) != (b.mantissa < 0)) return a.mantissa < b.mantissa;
    int32_t l = std::min(a.level, b.level);
    int da = a.level - l, db = b.level - l;
    if (da > 100 || db > 100) {
      // Magnitudes differ enormously; decide by position of the top bit.
      long ma = std::bit_width(static_cast<uint64_t>(std::abs(a.mantissa))) + a.level;
      long mb = std::bit_width(static_cast<uint64_t>(std::abs(b.mantissa))) + b.level;
      bool neg = a.mantissa < 0;
      return neg ? (ma > mb) : (ma < mb);
    }
    __int128 va = static_cast<__int128>(a.mantissa) << da;
    __int128 vb = static_cast<__int128>(b.mantissa) << db;
    return va < vb;
  }
  friend bool operator>(const DyadicScalar& a, const DyadicScalar& b) { return b < a; }
  friend bool operator<=(const DyadicScalar& a, const DyadicScalar& b) { return !(b < a); }
  friend bool operator>=(const DyadicScalar& a, const DyadicScalar& b) { return !(a < b); }

  std::string str() const {
    if (level >= 0) return std::to_string(checked_shl(mantissa, level));
    return std::to_string(mantissa) + "/" + std::to_string(int64_t{1} << -level);
  }
};

inline HeightValue height(const DyadicScalar& x) { return x.height(); }

struct DyadicPoint {
  DyadicScalar x, y;
  friend bool operator==(const DyadicPoint& a, const DyadicPoint& b) {
    return a.x == b.x && a.y == b.y;
  }
  DyadicPoint doubled() const { return {x.doubled(), y.doubled()}; }
  double dx() const { return x.to_double(); }
  double dy() const { return y.to_double(); }
};

// L1 distance, exact.
inline DyadicScalar l1_dist(const DyadicPoint& a, const DyadicPoint& b) {
  return (a.x - b.x).abs() + (a.y - b.y).abs();
}

}  // namespace sirsn
