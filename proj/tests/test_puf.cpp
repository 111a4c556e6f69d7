#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "nrpuf/lfsr.hpp"
#include "nrpuf/puf.hpp"

using namespace nrpuf;

namespace {

// Bit-at-a-time reference for the register.
std::uint64_t reference_word(std::uint64_t& s) {
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t b = ((s >> 0) ^ (s >> 1) ^ (s >> 3) ^ (s >> 4)) & 1u;
    s = (s >> 1) | (b << 63);
  }
  return s;
}

PufConfig small_config() {
  PufConfig c;
  c.rows = c.cols = 32;
  c.dummy_rows = c.dummy_cols = 16;
  return c;
}

Environment quiet() { return Environment{}.quiet(); }

}  // namespace

TEST(Lfsr, BlockStepMatchesBitwise) {
  Stream rng(3);
  for (int t = 0; t < 200; ++t) {
    std::uint64_t seed = rng();
    Lfsr64 l(seed);
    std::uint64_t ref = seed;
    for (int w = 0; w < 8; ++w) EXPECT_EQ(l.next_word(), reference_word(ref));
  }
}

TEST(Lfsr, SingleStepMatchesBitwise) {
  Lfsr64 l(0x0123456789ABCDEFULL);
  std::uint64_t s = 0x0123456789ABCDEFULL;
  for (int i = 0; i < 64; ++i) l.step();
  EXPECT_EQ(l.state(), reference_word(s));
}

TEST(Lfsr, ZeroSeedIsSubstituted) {
  Lfsr64 l(0);
  EXPECT_EQ(l.state(), Lfsr64::kZeroSubstitute);
  EXPECT_NE(l.next_word(), 0u);
}

TEST(Lfsr, NoShortCycleFromSmallSeed) {
  Lfsr64 l(1);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 10000; ++i) EXPECT_TRUE(seen.insert(l.next_word()).second);
}

TEST(Pelgrom, Examples) {
  EXPECT_DOUBLE_EQ(pelgrom_offset(5e-9, 1e-6, 1e-6, 1e-6, 1e-6), 5e-9);
  EXPECT_DOUBLE_EQ(pelgrom_offset(5e-9, 4e-6, 1e-6, 1e-6, 1e-6), 2.5e-9);
  EXPECT_DOUBLE_EQ(pelgrom_offset(5e-9, 4e-6, 4e-6, 1e-6, 1e-6), 1.25e-9);
  EXPECT_THROW(pelgrom_offset(5e-9, 0, 1e-6, 1e-6, 1e-6), ConfigError);
  EXPECT_THROW(pelgrom_offset(5e-9, 1e-6, 1e-6, -1e-6, 1e-6), ConfigError);
}

TEST(ExpandChallenge, DeterministicAndWellFormed) {
  Stream rng(4);
  for (int i = 0; i < 1000; ++i) {
    const Challenge c{rng()};
    for (std::size_t cs = 1; cs <= 5; ++cs) {
      const auto a1 = expand_challenge(c, std::nullopt, ArrayId::a, cs, 128, 128);
      const auto a2 = expand_challenge(c, std::nullopt, ArrayId::a, cs, 128, 128);
      EXPECT_EQ(a1, a2);
      EXPECT_NO_THROW(a1.validate(128, 128));
      EXPECT_EQ(a1.columns.size(), cs);
      const auto b = expand_challenge(c, 1, ArrayId::b, cs, 128, 128);
      EXPECT_EQ(b, expand_challenge(c, 1, ArrayId::b, cs, 128, 128));
      EXPECT_NO_THROW(b.validate(128, 128));
    }
  }
}

TEST(ExpandChallenge, HiddenBitArgumentRules) {
  EXPECT_THROW(expand_challenge({1}, 0, ArrayId::a, 5, 128, 128), ConfigError);
  EXPECT_THROW(expand_challenge({1}, std::nullopt, ArrayId::b, 5, 128, 128), ConfigError);
  EXPECT_THROW(expand_challenge({1}, 2, ArrayId::b, 5, 128, 128), ConfigError);
  EXPECT_THROW(expand_challenge({1}, std::nullopt, ArrayId::a, 6, 128, 128), ConfigError);
}

TEST(ExpandChallenge, ZeroChallengeIsUsable) {
  const auto s = expand_challenge({0}, std::nullopt, ArrayId::a, 5, 128, 128);
  EXPECT_NO_THROW(s.validate(128, 128));
}

TEST(ExpandChallenge, HiddenBitChangesSelectionB) {
  Stream rng(10);
  int differ = 0;
  for (int i = 0; i < 1000; ++i) {
    const Challenge c{rng()};
    differ += expand_challenge(c, 0, ArrayId::b, 5, 128, 128) != expand_challenge(c, 1, ArrayId::b, 5, 128, 128);
  }
  EXPECT_GE(differ, 990);
}

TEST(Msal, FarOutsideMargin) {
  Stream rng(1);
  const ComparatorParams c{0, 20e-9, 0};
  EXPECT_EQ(msal_compare(2e-6, 1e-6, c, rng), 1);
  EXPECT_EQ(msal_compare(1e-6, 2e-6, c, rng), 0);
}

TEST(Msal, InsideMarginIsFairCoin) {
  Stream rng(2);
  const ComparatorParams c{0, 20e-9, 0};
  int ones = 0;
  for (int i = 0; i < 10000; ++i) ones += msal_compare(110e-9, 100e-9, c, rng);
  EXPECT_GE(ones / 1e4, 0.47);
  EXPECT_LE(ones / 1e4, 0.53);
}

TEST(Msal, ZeroMarginIsSign) {
  Stream rng(3);
  const ComparatorParams c{0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform01() * 1e-6, b = rng.uniform01() * 1e-6;
    if (a == b) continue;
    EXPECT_EQ(msal_compare(a, b, c, rng), a > b ? 1 : 0);
    EXPECT_EQ(msal_compare(b, a, c, rng), a > b ? 0 : 1);
  }
}

TEST(Msal, OffsetShiftsDecision) {
  Stream rng(3);
  const ComparatorParams c{5e-9, 0, 30e-9};
  EXPECT_EQ(msal_compare(100e-9, 120e-9, c, rng), 1);
}

TEST(MakePuf, DeterministicAndShaped) {
  const auto cfg = small_config();
  const auto a = make_puf(cfg, 99);
  const auto b = make_puf(cfg, 99);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, make_puf(cfg, 100));
  EXPECT_EQ(a.rows(), 32u);
  EXPECT_EQ(a.dummy.size(), 256u);
  EXPECT_NE(a.cba_a, a.cba_b);
  EXPECT_NE(a.comp_a.offset_value, a.comp_b.offset_value);
  EXPECT_NO_THROW(a.validate());
}

TEST(MakePuf, RejectsBadConfig) {
  auto cfg = small_config();
  cfg.cs = 6;
  EXPECT_THROW(make_puf(cfg, 1), ConfigError);
  cfg = small_config();
  cfg.rows = 1;
  EXPECT_THROW(make_puf(cfg, 1), ConfigError);
}

TEST(EvaluateBit, NoiseFreeIsPureFunction) {
  auto cfg = small_config();
  cfg.sense_margin = 0;
  cfg.power.noise_w = 0;
  const auto puf = make_puf(cfg, 5);
  Stream rng(8);
  for (int i = 0; i < 200; ++i) {
    const Challenge c{rng()};
    Stream r1(rng()), r2(rng());
    const auto o1 = evaluate_bit(puf, c, quiet(), 0, r1);
    const auto o2 = evaluate_bit(puf, c, quiet(), 0, r2);
    EXPECT_EQ(o1.bit, o2.bit);
    EXPECT_EQ(o1.power, o2.power);
    EXPECT_EQ(o1.bit, evaluate_noise_free(puf, c, quiet()));
  }
}

TEST(EvaluateBit, MatchesManualPipeline) {
  auto cfg = small_config();
  cfg.sense_margin = 0;
  cfg.power.noise_w = 0;
  cfg.power.latch_bit_w = 0;
  const auto puf = make_puf(cfg, 6);
  const auto env = quiet();
  Stream rng(1);
  for (int i = 0; i < 100; ++i) {
    const Challenge c{rng()};
    auto sum = [&](const CrossbarArray& a, std::size_t row, const Selection& s) {
      double x = 0;
      for (auto col : s.columns) x += 0.1 / a.at(row, col).base_resistance;
      return x;
    };
    const auto sa = expand_challenge(c, std::nullopt, ArrayId::a, 5, 32, 32);
    const double pa = sum(puf.cba_a, sa.row_p, sa), qa = sum(puf.cba_a, sa.row_q, sa);
    const int h = (pa - qa) + puf.comp_a.offset_value > 0;
    const auto sb = expand_challenge(c, h, ArrayId::b, 5, 32, 32);
    const double pb = sum(puf.cba_b, sb.row_p, sb), qb = sum(puf.cba_b, sb.row_q, sb);
    const int bit = (pb - qb) + puf.comp_b.offset_value > 0;

    Stream r(2);
    const auto out = evaluate_bit(puf, c, env, 0, r);
    EXPECT_EQ(out.hidden_bit, h);
    EXPECT_EQ(out.bit, bit);
    EXPECT_NEAR(out.i_p, pb, 1e-20);
    EXPECT_NEAR(out.i_q, qb, 1e-20);
    EXPECT_EQ(out.i_d, 0.0);
    EXPECT_NEAR(out.power, 0.1 * (pa + qa + pb + qb), 1e-20);
  }
}

TEST(EvaluateBit, SingleArchitectureUsesArrayA) {
  auto cfg = small_config();
  const auto puf = make_puf(cfg, 7);
  Stream rng(2);
  for (int i = 0; i < 100; ++i) {
    const Challenge c{rng()};
    Stream r(3);
    const auto out = evaluate_bit(puf, c, Environment{}, 0, r, Architecture::single);
    EXPECT_EQ(out.bit, out.hidden_bit);
    EXPECT_EQ(out.i_p, out.i_p_a);
  }
}

TEST(EvaluateBit, DummyCountBounded) {
  const auto puf = make_puf(small_config(), 1);
  Stream r(1);
  EXPECT_THROW(evaluate_bit(puf, {1}, Environment{}, 257, r), ConfigError);
  EXPECT_NO_THROW(evaluate_bit(puf, {1}, Environment{}, 256, r));
}

TEST(EvaluateBit, PowerNonNegative) {
  auto cfg = small_config();
  cfg.power.noise_w = 1e-5;  // large enough to push some samples below zero
  const auto puf = make_puf(cfg, 2);
  Stream rng(4);
  for (int i = 0; i < 2000; ++i) {
    Stream r(rng());
    EXPECT_GE(evaluate_bit(puf, {rng()}, Environment{}, 0, r).power, 0.0);
  }
}

TEST(Power, SingleHundredKiloOhmDeviceIsHundredNanowatt) {
  // One-cell arrays: the only non-zero contribution is the dummy cell.
  PufInstance puf;
  const std::vector<ReRAMCell> big(2 * 5, {CellState::hrs, 1e300});
  puf.cba_a = CrossbarArray(2, 5, big);
  puf.cba_b = CrossbarArray(2, 5, big);
  puf.dummy = CrossbarArray(1, 1, {{CellState::hrs, 100e3}});
  puf.power = {0, 0, 0};
  puf.cs = 1;
  Stream r(1);
  const auto out = evaluate_bit(puf, {1}, quiet(), 1, r);
  EXPECT_NEAR(out.power, 100e-9, 1e-21);
  EXPECT_NEAR(0.1 * 0.1 / 100e3, 100e-9, 1e-21);
}

TEST(Power, DummyCurrentRaisesMeanPower) {
  const auto puf = make_puf(small_config(), 3);
  Stream rng(5);
  std::vector<Challenge> cs(500);
  for (auto& c : cs) c.bits = rng();
  double prev = -1;
  for (std::size_t d : {0, 1, 4, 16, 64}) {
    double sum = 0;
    for (const auto& c : cs) {
      Stream r = evaluation_stream(puf, c, 0);
      sum += evaluate_bit(puf, c, Environment{}, d, r).power;
    }
    EXPECT_GT(sum, prev);
    prev = sum;
  }
}

TEST(Evaluation, StreamKeyedByInstanceChallengeTrial) {
  const auto puf = make_puf(small_config(), 3);
  EXPECT_EQ(evaluation_stream(puf, {5}, 0), evaluation_stream(puf, {5}, 0));
  EXPECT_NE(evaluation_stream(puf, {5}, 0), evaluation_stream(puf, {5}, 1));
  EXPECT_NE(evaluation_stream(puf, {5}, 0), evaluation_stream(puf, {6}, 0));
}

TEST(Evaluation, ResponsesAreBalanced) {
  const auto puf = make_puf(PufConfig{}, 11);
  Stream rng(6);
  int ones = 0;
  for (int i = 0; i < 4000; ++i) ones += evaluate_noise_free(puf, {rng()}, quiet());
  EXPECT_NEAR(ones / 4000.0, 0.5, 0.05);
}

TEST(Evaluation, DisplaceHalf) {
  const Selection s{{0, 3, 70}, 1, 127};
  const auto d = displace_half(s, 128, 128);
  EXPECT_EQ(d.columns, (std::vector<std::size_t>{64, 67, 6}));
  EXPECT_EQ(d.row_p, 65u);
  EXPECT_EQ(d.row_q, 63u);
}

TEST(PufInstance, OperatingKnobs) {
  const auto puf = make_puf(small_config(), 1);
  EXPECT_EQ(puf.with_cs(2).cs, 2u);
  EXPECT_THROW(puf.with_cs(0), ConfigError);
  EXPECT_THROW(puf.with_cs(6), ConfigError);
  EXPECT_EQ(puf.with_sense_margin(0).comp_b.sense_margin, 0.0);
  EXPECT_THROW(puf.with_sense_margin(-1), ConfigError);
}
