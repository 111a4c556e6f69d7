#include <bit>
#include <cmath>

#include <gtest/gtest.h>

#include "nrpuf/crp.hpp"

using namespace nrpuf;

namespace {

// Counts (column subset, row pair, hidden value) triples directly.
std::uint64_t enumerate_crps(unsigned n, unsigned m, unsigned cs, unsigned l) {
  std::uint64_t count = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<unsigned>(std::popcount(mask)) != cs) continue;
    for (unsigned p = 0; p < m; ++p)
      for (unsigned q = p + 1; q < m; ++q) count += l;
  }
  return count;
}

}  // namespace

TEST(Binomial, SmallValues) {
  EXPECT_EQ(binomial(128, 5), BigInt(264566400));
  EXPECT_EQ(binomial(128, 2), BigInt(8128));
  EXPECT_EQ(binomial(5, 7), BigInt(0));
  EXPECT_EQ(binomial(200, 100), BigInt("90548514656103281165404177077484163874504589675413336841320"));
}

TEST(CrpCount, Examples) {
  EXPECT_EQ(crp_count(2, 2, 1, 1, CrpFormula::eq5), BigInt(2));
  EXPECT_EQ(crp_count(128, 128, 5, 1, CrpFormula::eq5), BigInt("2150395699200"));
  EXPECT_EQ(crp_count(128, 128, 5, 1, CrpFormula::table1, Log2Mode::floor),
            BigInt(264566400) * 8128 * 12);
  const double real = crp_count(128, 128, 5, 1, CrpFormula::table1).convert_to<double>();
  EXPECT_NEAR(real, 2150395699200.0 * std::log2(8128.0), 2.0);
  EXPECT_GE(real, 2.7e13);
  EXPECT_LT(real, 2.8e13);
}

TEST(CrpCount, MatchesEnumerationForSmallArrays) {
  for (unsigned n = 1; n <= 8; ++n)
    for (unsigned m = 2; m <= 8; ++m)
      for (unsigned cs = 1; cs <= std::min(n, 5u); ++cs)
        for (unsigned l = 1; l <= 2; ++l)
          EXPECT_EQ(crp_count(n, m, cs, l, CrpFormula::eq5), BigInt(enumerate_crps(n, m, cs, l)))
              << n << " " << m << " " << cs << " " << l;
}

TEST(CrpCount, NoOverflow) {
  // Far beyond 64 bits.
  const auto big = crp_count(4096, 4096, 5, 1, CrpFormula::eq5);
  EXPECT_GT(big, BigInt(std::numeric_limits<std::uint64_t>::max()));
  EXPECT_EQ(big, binomial(4096, 5) * binomial(4096, 2));
}

TEST(CrpCount, RejectsBadArguments) {
  EXPECT_THROW(crp_count(4, 4, 5, 1, CrpFormula::eq5), ConfigError);
  EXPECT_THROW(crp_count(4, 1, 1, 1, CrpFormula::eq5), ConfigError);
  EXPECT_THROW(crp_count(4, 4, 0, 1, CrpFormula::eq5), ConfigError);
  EXPECT_THROW(parse_crp_formula("eq6"), ConfigError);
  EXPECT_THROW(parse_log2_mode("ceil"), ConfigError);
}
