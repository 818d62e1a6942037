// Counter-based keyed hashing for all randomness: random access,
// reproducible, independent of evaluation order.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace sirsn {

inline uint64_t mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Hash of a short tuple of words; the first word is conventionally the seed.
inline uint64_t hash_key(std::initializer_list<uint64_t> words) {
  uint64_t h = 0x2545f4914f6cdd1dull;
  for (uint64_t w : words) h = mix64(h ^ w);
  return h;
}

// Uniform in (0, 1); never returns 0 or 1.
inline double uniform_from_hash(uint64_t h) {
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse of the standard normal CDF (Wichura's AS241, double precision).
inline double inverse_normal_cdf(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) *
                    r +
                45921.953931549871457) *
                   r +
               13731.693765509461125) *
                  r +
              1971.5909503065514427) *
                 r +
             133.14166789178437745) *
                r +
            3.387132872796366608) /
           (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                 39307.89580009271061) *
                    r +
                21213.794301586595867) *
                   r +
               5394.1960214247511077) *
                  r +
              687.1870074920579083) *
                 r +
             42.313330701600911252) *
                r +
            1.0);
  }
  double r = (q < 0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) *
                   r +
               1.27045825245236838258) *
                  r +
              3.64784832476320460504) *
                 r +
             5.7694972214606914055) *
                r +
            4.6303378461565452959) *
               r +
           1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) *
                   r +
               0.14810397642748007459) *
                  r +
              0.68976733498510000455) *
                 r +
             1.6763848301838038494) *
                r +
            2.05319162663775882187) *
               r +
           1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) *
                   r +
               0.026532189526576123093) *
                  r +
              0.29656057182850489123) *
                 r +
             1.7848265399172913358) *
                r +
            5.4637849111641143699) *
               r +
           6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) *
                   r +
               7.868691311456132591e-4) *
                  r +
              0.0148753612908506148525) *
                 r +
             0.13692988092273580531) *
                r +
            0.59983220655588793769) *
               r +
           1.0);
  }
  return (q < 0) ? -val : val;
}

inline double normal_from_hash(uint64_t h) { return inverse_normal_cdf(uniform_from_hash(h)); }

// Poisson count by inversion for small means; larger means split additively
// into independent halves so the distribution stays exact.
inline int64_t poisson_count(uint64_t key, double mean) {
  if (mean <= 0) return 0;
  if (mean > 25.0) {
    return poisson_count(mix64(key ^ 0x6a09e667f3bcc908ull), mean / 2) +
           poisson_count(mix64(key ^ 0xbb67ae8584caa73bull), mean / 2);
  }
  const double limit = std::exp(-mean);
  double prod = 1.0;
  int64_t n = 0;
  while (true) {
    prod *= uniform_from_hash(hash_key({key, 0x9u, static_cast<uint64_t>(n)}));
    if (prod <= limit) return n;
    ++n;
  }
}

}  // namespace sirsn
