// Run-level model parameters.
#pragma once

#include <cstdint>
#include <stdexcept>

#include "sirsn/rational.hpp"

namespace sirsn {

struct SearchBoxPolicy {
  int32_t max_doublings = 10;   // hard growth limit; exceeding it is an error
  int64_t min_half_side = 4;    // in lattice units of the query level
};

struct ModelParams {
  Gamma gamma{3, 4};
  int32_t h_min = -4;           // finest lattice level used anywhere in a run
  uint64_t master_seed = 1;
  SearchBoxPolicy box;

  void validate() const {
    if (2 * gamma.p <= gamma.q || gamma.p >= gamma.q)
      throw std::invalid_argument("gamma outside (1/2,1)");
    if (h_min > 0) throw std::invalid_argument("h_min must be <= 0");
  }
};

// Parameters of the invariance wrapper: random translation depth, rotation,
// and the scale-free rescaling C with density 1/(c log 2) on (1, 2).
struct InvarianceParams {
  int32_t translation_depth = 0;  // n: U_n uniform on [0, 2^n]^2, coupled over n
  double rotation_angle = 0.0;    // radians
  double scale_c = 1.0;           // C in [1, 2); 1 disables rescaling
  uint64_t seed = 0;

  static InvarianceParams sample(uint64_t seed, int32_t depth) {
    InvarianceParams inv;
    inv.seed = seed;
    inv.translation_depth = depth;
    inv.rotation_angle =
        2.0 * M_PI * uniform_from_hash_raw(seed, 0x11);
    inv.scale_c = std::exp2(uniform_from_hash_raw(seed, 0x12));  // density 1/(c ln 2) on (1,2)
    return inv;
  }

 private:
  static double uniform_from_hash_raw(uint64_t seed, uint64_t tag);
};

}  // namespace sirsn

#include "sirsn/hash_rng.hpp"

namespace sirsn {
inline double InvarianceParams::uniform_from_hash_raw(uint64_t seed, uint64_t tag) {
  return uniform_from_hash(hash_key({seed, tag}));
}
}  // namespace sirsn
