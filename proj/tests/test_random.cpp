#include <set>

#include <gtest/gtest.h>

#include "nrpuf/random.hpp"

using namespace nrpuf;

TEST(DeriveSeed, PureAndKeySensitive) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {2}), derive_seed(1, {2, 0}));
  EXPECT_NE(derive_seed(1, StreamTag::array_a), derive_seed(1, StreamTag::array_b));
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 10000; ++i) EXPECT_TRUE(seen.insert(derive_seed(9, StreamTag::instance, {i})).second);
}

TEST(Stream, Reproducible) {
  Stream a(5), b(5), c(6);
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
  }
}

TEST(Stream, SplitIsIndependentOfLaterUse) {
  Stream a(5), b(5);
  Stream ca = a.split();
  a();
  a();
  Stream cb = b.split();
  EXPECT_EQ(ca(), cb());
}

TEST(Stream, BelowStaysInRangeAndCoversIt) {
  Stream r(3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = r.below(7);
    ASSERT_LT(x, 7u);
    hist[x]++;
  }
  for (int h : hist) EXPECT_NEAR(h, 10000, 500);
}

TEST(Stream, Uniform01Range) {
  Stream r(4);
  double s = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    s += u;
  }
  EXPECT_NEAR(s / 100000, 0.5, 0.005);
}
