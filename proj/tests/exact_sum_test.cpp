#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "ttedepth/exact_sum.hpp"

namespace ttedepth {
namespace {

TEST(ExactSumTest, EmptyIsZero) { EXPECT_EQ(ExactSum().result(), 0.0); }

TEST(ExactSumTest, RecoversCancelledTerms) {
  ExactSum s;
  for (double v : {1e100, 1.0, -1e100}) s.add(v);
  EXPECT_EQ(s.result(), 1.0);
}

TEST(ExactSumTest, MatchesKnownTenthSum) {
  // Ten copies of 0.1 sum to exactly 1 after correct rounding, while naive
  // left-to-right summation gives 0.9999999999999999.
  std::vector<double> v(10, 0.1);
  double naive = 0.0;
  for (double x : v) naive += x;
  EXPECT_NE(naive, 1.0);
  EXPECT_EQ(exact_sum(v), 1.0);
}

TEST(ExactSumTest, HalfwayCaseRoundsToEven) {
  // 1 + 2^-53 + 2^-106: the tail pushes the halfway case up.
  ExactSum s;
  s.add(1.0);
  s.add(0x1.0p-53);
  s.add(0x1.0p-106);
  EXPECT_EQ(s.result(), 1.0 + 0x1.0p-52);
}

TEST(ExactSumTest, OrderIndependentOnRandomInputs) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(200);
    for (auto& x : v) x = u(gen) * std::ldexp(1.0, static_cast<int>(gen() % 40) - 20);
    const double expected = exact_sum(v);
    for (int k = 0; k < 5; ++k) {
      std::shuffle(v.begin(), v.end(), gen);
      EXPECT_EQ(exact_sum(v), expected);
    }
  }
}

}  // namespace
}  // namespace ttedepth
