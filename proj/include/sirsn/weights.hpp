// Secondary randomization: Gaussian weights on dyadic lattice edges.
//
// The field assigns every dyadic interval-edge e a value field(e) with
//   field(e) = field(e1) + field(e2)
// for the two half-length children e1, e2, exactly (the paper's refinement
// coupling), so the weight of a segment is independent of the decomposition
// level.  Edges at the natural level of their line are hashed directly;
// finer edges split the parent by a Gaussian bridge.  Hash keys depend only
// on scale-free coordinates, so the field is invariant under doubling:
// field(sigma_2 e) = sqrt(2) * field(e), which preserves every weight
// comparison.  Edges on the two axes carry zero weight.
#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "sirsn/dyadic.hpp"
#include "sirsn/hash_rng.hpp"

namespace sirsn {

namespace detail {
constexpr uint64_t kTagAnchor = 0xA1;
constexpr uint64_t kTagBridge = 0xB2;

struct EdgeKeyW {
  int64_t k;        // start index of the interval at its own level
  int64_t line_m;   // canonical mantissa of the fixed coordinate
  int32_t rel;      // line level minus interval level (scale-free)
  uint8_t axis;     // 0: horizontal edge, 1: vertical edge
  friend bool operator==(const EdgeKeyW& a, const EdgeKeyW& b) {
    return a.k == b.k && a.line_m == b.line_m && a.rel == b.rel && a.axis == b.axis;
  }
};

struct EdgeKeyWHash {
  size_t operator()(const EdgeKeyW& e) const {
    return hash_key({static_cast<uint64_t>(e.k), static_cast<uint64_t>(e.line_m),
                     static_cast<uint64_t>(static_cast<int64_t>(e.rel)), e.axis});
  }
};
}  // namespace detail

class WeightField {
 public:
  explicit WeightField(uint64_t seed, int32_t unit_level) : seed_(seed), unit_level_(unit_level) {}

  // Weight of the interval [lo, hi] x {line} (or {line} x [lo, hi] for
  // vertical), normalized so unit edges at unit_level have variance 1.
  // Bounds are given as indices at `at_level`.
  double segment_weight(uint8_t axis, const DyadicScalar& line, int64_t index_lo,
                        int64_t index_hi, int32_t at_level) const {
    if (line.is_zero()) return 0.0;
    if (index_lo > index_hi) std::swap(index_lo, index_hi);
    double acc = 0.0;
    // Greedy maximal dyadic decomposition of [index_lo, index_hi).
    int64_t a = index_lo;
    while (a < index_hi) {
      int level = a == 0 ? 62 : std::countr_zero(static_cast<uint64_t>(std::abs(a)));
      while (level > 0 && a + (int64_t{1} << level) > index_hi) --level;
      acc += block_weight(axis, line, a >> level, at_level + level);
      a += int64_t{1} << level;
    }
    return acc;
  }

  // Weight of one unit edge at unit_level (a standard normal variate).
  double unit_edge_weight(uint8_t axis, const DyadicScalar& line, int64_t index) const {
    if (line.is_zero()) return 0.0;
    return block_weight(axis, line, index, unit_level_);
  }

 private:
  // field of the dyadic block [k*2^level, (k+1)*2^level], in units where a
  // block at unit_level_ has variance 1: returns 2^((level-unit_level_)/2) * g.
  double block_weight(uint8_t axis, const DyadicScalar& line, int64_t k, int32_t level) const {
    return std::exp2(0.5 * (level - unit_level_)) * g(axis, line, k, level);
  }

  // Normalized field: standard normal at every level, additive after
  // rescaling: g(parent) = (g(left) + g(right)) / sqrt(2).
  double g(uint8_t axis, const DyadicScalar& line, int64_t k, int32_t level) const {
    const int32_t anchor = line.level;
    detail::EdgeKeyW key{k, line.mantissa, anchor - level, axis};
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    double val;
    if (level == anchor) {
      val = normal_from_hash(hash_key({seed_, detail::kTagAnchor, axis, static_cast<uint64_t>(k),
                                       static_cast<uint64_t>(line.mantissa)}));
    } else if (level < anchor) {
      int64_t kp = k >> 1;
      double parent = g(axis, line, kp, level + 1);
      double bridge = normal_from_hash(
          hash_key({seed_, detail::kTagBridge, axis, static_cast<uint64_t>(kp),
                    static_cast<uint64_t>(line.mantissa),
                    static_cast<uint64_t>(static_cast<int64_t>(anchor - level - 1))}));
      val = ((k & 1) == 0 ? parent + bridge : parent - bridge) * M_SQRT1_2;
    } else {
      val = (g(axis, line, 2 * k, level - 1) + g(axis, line, 2 * k + 1, level - 1)) * M_SQRT1_2;
    }
    cache_.emplace(key, val);
    return val;
  }

  uint64_t seed_;
  int32_t unit_level_;
  mutable std::unordered_map<detail::EdgeKeyW, double, detail::EdgeKeyWHash> cache_;
};

}  // namespace sirsn
