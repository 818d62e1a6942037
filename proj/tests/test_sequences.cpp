#include "sirsn/sequences.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sirsn;

namespace {
// Random admissable sequence: a peak with two height-monotone arms, each
// step drawn inside the window allowed by the current height.
std::vector<int64_t> random_admissable(std::mt19937_64& rng) {
  int peak_h = 1 + static_cast<int>(rng() % 12);
  int64_t peak = ((static_cast<int64_t>(rng() % 64) * 2 + 1) << peak_h);
  if (rng() & 1) peak = -peak;
  auto arm = [&](int64_t from) {
    std::vector<int64_t> seq{from};
    int64_t cur = from;
    while (true) {
      int h = cur == 0 ? 62 : height_of_int(cur);
      if (h == 0 || (rng() % 3) == 0) break;
      if (h > 20) h = 20;
      int64_t d = 1 + static_cast<int64_t>(rng() % ((int64_t{1} << h) - 1));
      cur = (rng() & 1) ? cur + d : cur - d;
      seq.push_back(cur);
    }
    return seq;
  };
  std::vector<int64_t> left = arm(peak), right = arm(peak);
  std::reverse(left.begin(), left.end());
  left.insert(left.end(), right.begin() + 1, right.end());
  return left;
}
}  // namespace

TEST(Sequences, Figure5Path) {
  std::vector<int64_t> fig5{75, 74, 72, 80, 96, 100, 99};
  EXPECT_TRUE(is_admissable(fig5));
  std::vector<int64_t> monotone{96, 80, 72, 74, 75};
  EXPECT_TRUE(is_height_monotone(monotone));
}

TEST(Sequences, NonMonotone) {
  std::vector<int64_t> s{4, 8};
  EXPECT_FALSE(is_height_monotone(s));  // heights 2 < 3 increase
  std::vector<int64_t> t{1, 9};
  EXPECT_FALSE(is_admissable(t));  // equal-height endpoints, no peak
}

TEST(Sequences, EmptyRejected) {
  std::vector<int64_t> empty;
  EXPECT_THROW(is_height_monotone(empty), std::invalid_argument);
  EXPECT_THROW(is_admissable(empty), std::invalid_argument);
}

TEST(Sequences, LengthBoundFigure5) {
  std::vector<int64_t> fig5{75, 74, 72, 80, 96, 100, 99};
  // total step length 1+2+8+16+4+1 = 32 <= 4 * (100-72)
  EXPECT_TRUE(admissable_length_bound(fig5));
}

TEST(Sequences, LengthBoundSingleton) {
  std::vector<int64_t> s{5};
  EXPECT_TRUE(admissable_length_bound(s));
}

TEST(Sequences, LengthBoundRejectsNonAdmissable) {
  std::vector<int64_t> s{1, 9};
  EXPECT_THROW(admissable_length_bound(s), std::invalid_argument);
}

// Property: every generated admissable sequence verifies and satisfies the
// 4x range bound.
TEST(Sequences, RandomAdmissableSatisfyBound) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 10000; ++i) {
    auto seq = random_admissable(rng);
    ASSERT_TRUE(is_admissable(seq));
    EXPECT_TRUE(admissable_length_bound(seq));
  }
}
