// Height-monotone and admissable integer sequences: the 1-D coordinate
// signatures of minimum-cost routes.
#pragma once

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "sirsn/dyadic.hpp"

namespace sirsn {

inline int64_t seq_height(int64_t v) {
  return v == 0 ? int64_t{kInfiniteHeight} : height_of_int(v);
}

// Strictly decreasing heights, with each step shorter than 2^height of the
// point it leaves.
inline bool is_height_monotone(std::span<const int64_t> seq) {
  if (seq.empty()) throw std::invalid_argument("empty sequence");
  for (size_t j = 0; j + 1 < seq.size(); ++j) {
    int64_t h = seq_height(seq[j]);
    if (seq_height(seq[j + 1]) >= h) return false;
    if (h < kInfiniteHeight) {
      if (h > 62) return false;
      uint64_t step = std::abs(seq[j + 1] - seq[j]);
      if (step >= (uint64_t{1} << h)) return false;
    }
  }
  return true;
}

inline bool is_height_monotone(const std::vector<int64_t>& seq) {
  return is_height_monotone(std::span<const int64_t>(seq));
}

// Concatenation, at the unique element of maximal height, of a reversed and
// a forward height-monotone sequence.
inline bool is_admissable(std::span<const int64_t> seq) {
  if (seq.empty()) throw std::invalid_argument("empty sequence");
  if (seq.size() == 1) return true;
  size_t peak = 0;
  bool peak_tie = false;
  for (size_t j = 1; j < seq.size(); ++j) {
    int64_t h = seq_height(seq[j]);
    int64_t hp = seq_height(seq[peak]);
    if (h > hp) {
      peak = j;
      peak_tie = false;
    } else if (h == hp) {
      peak_tie = true;
    }
  }
  if (peak_tie) return false;
  std::vector<int64_t> left(seq.begin(), seq.begin() + peak + 1);
  std::reverse(left.begin(), left.end());
  std::vector<int64_t> right(seq.begin() + peak, seq.end());
  return is_height_monotone(left) && is_height_monotone(right);
}

inline bool is_admissable(const std::vector<int64_t>& seq) {
  return is_admissable(std::span<const int64_t>(seq));
}

// Total step length of an admissable sequence is at most 4x its range.
inline bool admissable_length_bound(std::span<const int64_t> seq) {
  if (!is_admissable(seq)) throw std::invalid_argument("sequence not admissable");
  int64_t total = 0, lo = seq[0], hi = seq[0];
  for (size_t j = 0; j + 1 < seq.size(); ++j) {
    total = checked_add(total, std::abs(seq[j + 1] - seq[j]));
  }
  for (int64_t v : seq) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return total <= 4 * (hi - lo);
}

inline bool admissable_length_bound(const std::vector<int64_t>& seq) {
  return admissable_length_bound(std::span<const int64_t>(seq));
}

}  // namespace sirsn
