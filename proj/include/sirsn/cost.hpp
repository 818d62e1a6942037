// Path costs as sparse height -> length ledgers, with exact comparison
// at rational gamma.
#pragma once

#include <map>
#include <stdexcept>

#include "sirsn/dyadic.hpp"
#include "sirsn/rational.hpp"

namespace sirsn {

enum class Ordering { Less, Equal, Greater };

// Exact cost of an axis-parallel lattice path: for each finite line height h,
// the total length travelled on height-h lines.  Travel on infinite-height
// lines (the axes) is free and tallied separately.
struct PathCost {
  std::map<int32_t, DyadicScalar> ledger;  // height -> length, all lengths > 0
  DyadicScalar free_length;                // length on infinite-height lines

  void add(HeightValue h, const DyadicScalar& len) {
    if (len.is_zero()) return;
    if (len.mantissa < 0) throw std::invalid_argument("negative length");
    if (h.infinite()) {
      free_length = free_length + len;
      return;
    }
    auto it = ledger.find(h.v);
    if (it == ledger.end())
      ledger.emplace(h.v, len);
    else {
      it->second = it->second + len;
    }
  }

  DyadicScalar total_length() const {
    DyadicScalar t = free_length;
    for (const auto& [h, len] : ledger) t = t + len;
    return t;
  }

  // Sum_h gamma^h * L_h, exactly.
  BigRational evaluate(const Gamma& gamma) const {
    BigRational acc;
    for (const auto& [h, len] : ledger)
      acc = acc + rational_pow(gamma.rat(), h) * BigRational::from_dyadic(len);
    return acc;
  }

  bool is_zero() const { return ledger.empty(); }

  friend bool operator==(const PathCost& a, const PathCost& b) {
    return a.ledger == b.ledger && a.free_length == b.free_length;
  }
};

inline PathCost edge_cost(bool horizontal, const DyadicScalar& line_coordinate,
                          const DyadicScalar& length) {
  (void)horizontal;  // cost depends only on the line height
  if (length.mantissa < 0) throw std::invalid_argument("negative length");
  PathCost c;
  c.add(line_coordinate.height(), length);
  return c;
}

// Exact comparison of two evaluated costs; Equal only for true ties.
inline Ordering compare_costs(const PathCost& a, const PathCost& b, const Gamma& gamma) {
  BigRational va = a.evaluate(gamma);
  BigRational vb = b.evaluate(gamma);
  if (va < vb) return Ordering::Less;
  if (vb < va) return Ordering::Greater;
  return Ordering::Equal;
}

}  // namespace sirsn
