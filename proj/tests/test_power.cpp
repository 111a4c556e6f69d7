#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "nrpuf/power.hpp"

using namespace nrpuf;

namespace {

PowerTrace two_class(const std::vector<double>& zeros, const std::vector<double>& ones) {
  PowerTrace t;
  std::size_t i = 0;
  for (double p : zeros) t.samples.push_back({i++, 0, p, 0});
  for (double p : ones) t.samples.push_back({i++, 1, p, 0});
  return t;
}

PufConfig small_config() {
  PufConfig c;
  c.rows = c.cols = 32;
  c.dummy_rows = c.dummy_cols = 16;
  return c;
}

}  // namespace

TEST(Snr, UnitSeparationUnitSpread) {
  // Means 0 and 1; deviations of +-a with a = 1/sqrt(2) give a pooled
  // (n - 2) deviation of exactly 1.
  const double a = std::sqrt(0.5);
  EXPECT_NEAR(snr(two_class({-a, a}, {1 - a, 1 + a})), 1.0, 1e-12);
}

TEST(Snr, ExactPooledFormula) {
  const std::vector<double> z{1, 2, 3, 4}, o{3, 5, 7};
  const double m0 = 2.5, m1 = 5;
  double ss = 0;
  for (double x : z) ss += (x - m0) * (x - m0);
  for (double x : o) ss += (x - m1) * (x - m1);
  EXPECT_NEAR(snr(two_class(z, o)), 2.5 / std::sqrt(ss / 5), 1e-12);
}

TEST(Snr, DegenerateTracesAreErrors) {
  EXPECT_THROW(snr(two_class({1, 2, 3}, {})), RuntimeError);
  EXPECT_THROW(snr(two_class({}, {1, 2})), RuntimeError);
  EXPECT_THROW(snr(two_class({1, 1}, {2, 2})), RuntimeError);
}

TEST(Snr, AffineInvariant) {
  Stream rng(4);
  std::vector<double> z(200), o(200);
  for (auto& x : z) x = normal(rng, 1.0, 0.3);
  for (auto& x : o) x = normal(rng, 1.2, 0.3);
  const double base = snr(two_class(z, o));
  for (auto [a, b] : {std::pair{2.0, 0.0}, {1e-9, 3e-9}, {3.5, -7.0}}) {
    auto z2 = z, o2 = o;
    for (auto& x : z2) x = a * x + b;
    for (auto& x : o2) x = a * x + b;
    EXPECT_NEAR(snr(two_class(z2, o2)), base, 1e-9 * base);
  }
}

TEST(Snr, AddedNoiseDoesNotIncreaseExpectedSnr) {
  Stream rng(6);
  double clean = 0, noisy = 0;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> z(300), o(300);
    for (auto& x : z) x = normal(rng, 0.0, 1.0);
    for (auto& x : o) x = normal(rng, 0.5, 1.0);
    clean += snr(two_class(z, o));
    for (auto& x : z) x += normal(rng, 0.0, 1.0);
    for (auto& x : o) x += normal(rng, 0.0, 1.0);
    noisy += snr(two_class(z, o));
  }
  EXPECT_LT(noisy, clean);
}

TEST(Ranks, AverageTies) {
  const std::vector<double> v{10, 20, 20, 5};
  EXPECT_EQ(ranks(v), (std::vector<double>{2, 3.5, 3.5, 1}));
}

TEST(Spearman, Basics) {
  const std::vector<double> x{0, 1, 2, 4, 8, 16, 32};
  const std::vector<double> down{7, 6, 5, 4, 3, 2, 1};
  const std::vector<double> up{0.1, 0.2, 0.3, 0.9, 1.0, 5, 100};
  EXPECT_NEAR(spearman(x, down), -1.0, 1e-12);
  EXPECT_NEAR(spearman(x, up), 1.0, 1e-12);
  // x = 1..5, y = 2,1,4,3,5 -> 1 - 6*4/(5*24) = 0.8
  EXPECT_NEAR(spearman(std::vector<double>{1, 2, 3, 4, 5}, std::vector<double>{2, 1, 4, 3, 5}), 0.8, 1e-12);
  EXPECT_THROW(spearman(std::vector<double>{1}, std::vector<double>{1}), ConfigError);
  EXPECT_THROW(spearman(x, std::vector<double>(7, 1.0)), RuntimeError);
}

TEST(CollectTraces, OneSamplePerChallenge) {
  const auto puf = make_puf(small_config(), 1);
  Stream rng(2);
  std::vector<Challenge> cs(2000);
  for (auto& c : cs) c.bits = rng();
  const auto t = collect_traces(puf, cs, Environment{}, 4);
  ASSERT_EQ(t.samples.size(), 2000u);
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    EXPECT_EQ(t.samples[i].challenge_index, i);
    EXPECT_EQ(t.samples[i].dummy_count, 4u);
    EXPECT_GE(t.samples[i].power_w, 0.0);
  }
  EXPECT_THROW(collect_traces(puf, std::vector<Challenge>{}, Environment{}, 0), ConfigError);
}

TEST(CollectTraces, NoiselessPowerIsVoltageTimesCurrent) {
  auto cfg = small_config();
  cfg.power = {0, 0, 0};
  const auto puf = make_puf(cfg, 3);
  const Environment env = Environment{}.quiet();
  std::vector<Challenge> cs{{1}, {2}, {3}};
  const auto t = collect_traces(puf, cs, env, 0);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    Stream r = evaluation_stream(puf, cs[i], 0);
    const auto o = evaluate_bit(puf, cs[i], env, 0, r);
    EXPECT_DOUBLE_EQ(t.samples[i].power_w, 0.1 * (o.i_p_a + o.i_q_a + o.i_p + o.i_q));
  }
}

TEST(CollectTraces, MeanPowerRisesWithDummies) {
  const auto puf = make_puf(small_config(), 4);
  Stream rng(3);
  std::vector<Challenge> cs(1000);
  for (auto& c : cs) c.bits = rng();
  double prev = 0;
  for (std::size_t d : {0, 1, 2, 4, 8, 16, 32}) {
    double sum = 0;
    for (const auto& s : collect_traces(puf, cs, Environment{}, d).samples) sum += s.power_w;
    EXPECT_GT(sum, prev);
    prev = sum;
  }
}

TEST(TraceCsv, HeaderAndRows) {
  PowerTrace t;
  t.samples.push_back({0, 1, 1.5e-7, 3});
  std::ostringstream os;
  write_trace_csv(os, t);
  EXPECT_EQ(os.str(), "challenge_index,output_bit,power_w,dummy_count\n0,1,1.5e-07,3\n");
}
