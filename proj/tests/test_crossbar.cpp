#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "nrpuf/crossbar.hpp"

using namespace nrpuf;

namespace {

Environment quiet() {
  Environment e;
  e.supply_sigma_frac = 0;
  e.temp_jitter = 0;
  return e;
}

CrossbarArray uniform_array(std::size_t rows, std::size_t cols, double r) {
  return CrossbarArray(rows, cols, std::vector<ReRAMCell>(rows * cols, {CellState::hrs, r}));
}

}  // namespace

TEST(BuildArray, SingleCell) {
  DeviceParams p;
  p.stuck_on_prob = 0;
  Stream rng(1);
  const auto a = build_array(1, 1, p, rng);
  EXPECT_EQ(a.size(), 1u);
  EXPECT_EQ(a.at(0, 0).state, CellState::hrs);
}

TEST(BuildArray, RejectsZeroDimension) {
  Stream rng(1);
  EXPECT_THROW(build_array(0, 4, DeviceParams{}, rng), ConfigError);
  EXPECT_THROW(build_array(4, 0, DeviceParams{}, rng), ConfigError);
}

TEST(BuildArray, StuckCountWithinBinomialBand) {
  Stream rng(3);
  const auto a = build_array(128, 128, DeviceParams{}, rng);
  EXPECT_EQ(a.size(), 16384u);
  const double mean = 16384 * 0.1;
  const double sd = std::sqrt(16384 * 0.1 * 0.9);
  EXPECT_NEAR(static_cast<double>(a.stuck_on_count()), mean, 3 * sd);
}

TEST(BuildArray, DeterministicPerSeed) {
  Stream a(77), b(77);
  EXPECT_EQ(build_array(16, 16, DeviceParams{}, a), build_array(16, 16, DeviceParams{}, b));
}

TEST(CrossbarArray, BoundsChecked) {
  const auto a = uniform_array(2, 5, 1e5);
  EXPECT_THROW(a.at(2, 0), RuntimeError);
  EXPECT_THROW(a.at(0, 5), RuntimeError);
  EXPECT_THROW(CrossbarArray(2, 2, std::vector<ReRAMCell>(3)), ConfigError);
}

TEST(RowCurrent, SingleColumn) {
  const auto a = uniform_array(2, 5, 1e6);
  Stream rng(1);
  const std::vector<std::size_t> cols{3};
  EXPECT_DOUBLE_EQ(row_current(a, DeviceParams{}, 0, cols, quiet(), rng), 100e-9);
}

TEST(RowCurrent, FiveIdenticalCells) {
  const auto a = uniform_array(2, 5, 500e3);
  Stream rng(1);
  const std::vector<std::size_t> cols{0, 1, 2, 3, 4};
  EXPECT_NEAR(row_current(a, DeviceParams{}, 1, cols, quiet(), rng), 1e-6, 1e-18);
}

TEST(RowCurrent, EmptySelection) {
  const auto a = uniform_array(2, 5, 500e3);
  Stream rng(1);
  EXPECT_EQ(row_current(a, DeviceParams{}, 0, {}, quiet(), rng), 0.0);
}

TEST(RowCurrent, OutOfRange) {
  const auto a = uniform_array(2, 5, 500e3);
  Stream rng(1);
  const std::vector<std::size_t> cols{5};
  EXPECT_THROW(row_current(a, DeviceParams{}, 0, cols, quiet(), rng), RuntimeError);
  EXPECT_THROW(row_current(a, DeviceParams{}, 2, std::vector<std::size_t>{0}, quiet(), rng), RuntimeError);
}

TEST(RowCurrent, EqualsBruteForceSum) {
  const DeviceParams p;
  Stream rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = build_array(8, 8, p, rng);
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < 8; ++c)
      if (rng.coin()) cols.push_back(c);
    const auto row = static_cast<std::size_t>(rng.below(8));
    double expected = 0;
    for (auto c : cols) expected += 0.1 / a.at(row, c).base_resistance;
    Stream r2(1);
    EXPECT_NEAR(row_current(a, p, row, cols, quiet(), r2), expected, 1e-20);
  }
}

TEST(RowCurrent, RealisedReadMatchesPerCellSum) {
  const DeviceParams p;
  Stream rng(8);
  const auto a = build_array(4, 8, p, rng);
  const std::vector<std::size_t> cols{1, 4, 6};
  const std::vector<double> v{0.09, 0.1, 0.11};
  double expected = 0;
  for (std::size_t k = 0; k < cols.size(); ++k) expected += cell_current_at(a(2, cols[k]), p, v[k], 310);
  EXPECT_DOUBLE_EQ(row_current_at(a, p, 2, cols, v, 310), expected);
}

TEST(CombineStats, Examples) {
  const std::vector<SumStats> one{{1e-6, 0}};
  EXPECT_EQ(combine_stats(one), (SumStats{1e-6, 0}));

  const std::vector<SumStats> five(5, SumStats{0, 132e-9 * 132e-9});
  const double sd = std::sqrt(combine_stats(five).variance);
  EXPECT_NEAR(sd, 132e-9 * std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(sd / 290e-9, 1.0, 0.02);

  const std::vector<SumStats> three{{1e-6, 0}, {2e-6, 0}, {3e-6, 0}};
  EXPECT_NEAR(combine_stats(three).mean, 6e-6, 1e-18);
  EXPECT_THROW(combine_stats({}), ConfigError);
}

// Fresh rows of CS cells: the empirical variance of the row current should
// match the sum of the per-cell moments.
TEST(CombineStats, MatchesMonteCarlo) {
  DeviceParams p;
  p.stuck_on_prob = 0;
  const SumStats cell{hrs_current_mean(p), hrs_current_sigma(p) * hrs_current_sigma(p)};
  Stream rng(19);
  for (std::size_t cs = 1; cs <= 5; ++cs) {
    const std::vector<SumStats> terms(cs, cell);
    const auto predicted = combine_stats(terms);
    const std::vector<std::size_t> cols = [&] {
      std::vector<std::size_t> c(cs);
      for (std::size_t k = 0; k < cs; ++k) c[k] = k;
      return c;
    }();
    const int n = 10000;
    double s = 0, ss = 0;
    for (int i = 0; i < n; ++i) {
      const auto row = build_array(1, cs, p, rng);
      Stream r2(1);
      const double x = row_current(row, p, 0, cols, quiet(), r2);
      s += x;
      ss += x * x;
    }
    const double mean = s / n;
    const double var = (ss - n * mean * mean) / (n - 1);
    EXPECT_NEAR(var / predicted.variance, 1.0, 0.10) << "cs=" << cs;
    EXPECT_NEAR(mean / predicted.mean, 1.0, 0.02) << "cs=" << cs;
  }
}
