#include "sirsn/hash_rng.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace sirsn;

TEST(HashRng, Deterministic) {
  EXPECT_EQ(hash_key({1, 2, 3}), hash_key({1, 2, 3}));
  EXPECT_NE(hash_key({1, 2, 3}), hash_key({1, 3, 2}));
}

TEST(HashRng, UniformRange) {
  for (uint64_t i = 0; i < 1000; ++i) {
    double u = uniform_from_hash(hash_key({42, i}));
    EXPECT_GT(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(HashRng, InverseNormalRoundTrip) {
  // Phi^{-1} at known quantiles
  EXPECT_NEAR(inverse_normal_cdf(0.5), 0.0, 1e-15);
  EXPECT_NEAR(inverse_normal_cdf(0.975), 1.959963984540054, 1e-12);
  EXPECT_NEAR(inverse_normal_cdf(0.0013498980316300946), -3.0, 1e-10);
}

TEST(HashRng, NormalMoments) {
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    double z = normal_from_hash(hash_key({7, static_cast<uint64_t>(i)}));
    s += z;
    s2 += z * z;
  }
  double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(HashRng, PoissonMoments) {
  const int n = 20000;
  const double mean = 37.5;  // exercises the splitting path
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    auto k = static_cast<double>(poisson_count(hash_key({9, static_cast<uint64_t>(i)}), mean));
    s += k;
    s2 += k * k;
  }
  double m = s / n, var = s2 / n - m * m;
  EXPECT_NEAR(m, mean, 4.0 * std::sqrt(mean / n));
  EXPECT_NEAR(var, mean, 5.0 * mean * std::sqrt(2.0 / n));
}

TEST(HashRng, PoissonZeroMean) { EXPECT_EQ(poisson_count(1, 0.0), 0); }
