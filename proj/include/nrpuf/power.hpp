#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "nrpuf/errors.hpp"
#include "nrpuf/puf.hpp"

namespace nrpuf {

struct PowerSample {
  std::size_t challenge_index = 0;
  int output_bit = 0;
  double power_w = 0;
  std::size_t dummy_count = 0;
};

struct PowerTrace {
  std::vector<PowerSample> samples;
};

/// One power sample per challenge. Challenge i uses the evaluation stream
/// derived from (instance seed, i, trial), so traces for different dummy
/// counts share everything except the dummy contribution.
inline PowerTrace collect_traces(const PufInstance& puf, std::span<const Challenge> challenges,
                                 const Environment& env, std::size_t dummy_count,
                                 std::uint64_t trial = 0) {
  if (challenges.empty()) throw ConfigError("collect_traces needs at least one challenge");
  PowerTrace trace;
  trace.samples.reserve(challenges.size());
  for (std::size_t i = 0; i < challenges.size(); ++i) {
    Stream rng = evaluation_stream(puf, challenges[i], trial);
    const auto out = evaluate_bit(puf, challenges[i], env, dummy_count, rng);
    trace.samples.push_back({i, out.bit, out.power, dummy_count});
  }
  return trace;
}

/// Two-class leakage SNR: |mean(P | bit=1) - mean(P | bit=0)| divided by
/// the pooled within-class standard deviation.
inline double snr(const PowerTrace& trace) {
  double sum[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (const auto& s : trace.samples) {
    sum[s.output_bit ? 1 : 0] += s.power_w;
    ++n[s.output_bit ? 1 : 0];
  }
  if (n[0] == 0 || n[1] == 0) throw RuntimeError("snr undefined: trace has a single output class");
  if (n[0] + n[1] < 3) throw RuntimeError("snr undefined: too few samples for a pooled deviation");
  const double mean[2] = {sum[0] / static_cast<double>(n[0]), sum[1] / static_cast<double>(n[1])};
  double ss = 0;
  for (const auto& s : trace.samples) {
    const double d = s.power_w - mean[s.output_bit ? 1 : 0];
    ss += d * d;
  }
  const double pooled = std::sqrt(ss / static_cast<double>(n[0] + n[1] - 2));
  if (!(pooled > 0)) throw RuntimeError("snr undefined: zero within-class deviation");
  return std::abs(mean[1] - mean[0]) / pooled;
}

/// Average ranks (ties share the mean rank).
inline std::vector<double> ranks(std::span<const double> v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t m = i; m <= j; ++m) r[order[m]] = avg;
    i = j + 1;
  }
  return r;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("spearman needs two equal series of length >= 2");
  const auto rx = ranks(x);
  const auto ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) throw RuntimeError("spearman undefined for a constant series");
  return sxy / std::sqrt(sxx * syy);
}

inline void write_trace_csv(std::ostream& os, const PowerTrace& trace) {
  os << "challenge_index,output_bit,power_w,dummy_count\n";
  char buf[64];
  for (const auto& s : trace.samples) {
    const auto res = std::to_chars(buf, buf + sizeof buf, s.power_w);
    os << s.challenge_index << ',' << s.output_bit << ',' << std::string_view(buf, res.ptr - buf) << ','
       << s.dummy_count << '\n';
  }
}

}  // namespace nrpuf
