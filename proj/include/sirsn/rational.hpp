// Arbitrary-precision rationals, used for exact cost evaluation and the
// gamma parameter.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sirsn/dyadic.hpp"

namespace sirsn {

using BigInt = boost::multiprecision::cpp_int;

struct BigRational {
  BigInt num = 0;
  BigInt den = 1;  // always > 0

  BigRational() = default;
  BigRational(BigInt n, BigInt d) : num(std::move(n)), den(std::move(d)) { normalize(); }
  BigRational(int64_t n) : num(n), den(1) {}
  static BigRational from_dyadic(const DyadicScalar& x) {
    BigRational r;
    r.num = x.mantissa;
    if (x.level >= 0)
      r.num <<= x.level;
    else
      r.den = BigInt(1) << -x.level;
    return r;
  }

  void normalize() {
    if (den == 0) throw std::invalid_argument("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    BigInt g = boost::multiprecision::gcd(boost::multiprecision::abs(num), den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend BigRational operator+(const BigRational& a, const BigRational& b) {
    return BigRational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend BigRational operator-(const BigRational& a, const BigRational& b) {
    return BigRational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend BigRational operator*(const BigRational& a, const BigRational& b) {
    return BigRational(a.num * b.num, a.den * b.den);
  }
  friend BigRational operator/(const BigRational& a, const BigRational& b) {
    if (b.num == 0) throw std::invalid_argument("division by zero");
    return BigRational(a.num * b.den, a.den * b.num);
  }
  friend bool operator==(const BigRational& a, const BigRational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const BigRational& a, const BigRational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator>(const BigRational& a, const BigRational& b) { return b < a; }
  friend bool operator<=(const BigRational& a, const BigRational& b) { return !(b < a); }
  friend bool operator>=(const BigRational& a, const BigRational& b) { return !(a < b); }

  double to_double() const {
    return static_cast<double>(boost::multiprecision::cpp_rational(num, den));
  }
  std::string str() const {
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
  }
};

// x^e for integer e (possibly negative).
inline BigRational rational_pow(const BigRational& x, long e) {
  BigRational r(1);
  BigRational base = x;
  long n = e;
  if (n < 0) {
    base = BigRational(1) / base;
    n = -n;
  }
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

// The speed parameter: an exact rational in (1/2, 1).
struct Gamma {
  int64_t p = 3;
  int64_t q = 4;

  Gamma() = default;
  Gamma(int64_t p_, int64_t q_) : p(p_), q(q_) {
    if (q <= 0 || p <= 0 || 2 * p <= q || p >= q)
      throw std::invalid_argument("gamma must be a rational in (1/2, 1)");
    int64_t g = std::gcd(p, q);
    p /= g;
    q /= g;
  }
  static Gamma parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) throw std::invalid_argument("gamma must be p/q");
    return Gamma(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  }
  BigRational rat() const { return BigRational(BigInt(p), BigInt(q)); }
  double value() const { return static_cast<double>(p) / static_cast<double>(q); }
  std::string str() const { return std::to_string(p) + "/" + std::to_string(q); }
  friend bool operator==(const Gamma& a, const Gamma& b) { return a.p == b.p && a.q == b.q; }
};

}  // namespace sirsn
