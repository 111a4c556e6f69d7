#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "nrpuf/errors.hpp"
#include "nrpuf/puf.hpp"

namespace nrpuf {

/// Response bits indexed by (instance, challenge, trial); each entry is an
/// n-bit response packed into 64-bit words.
class ResponseRecord {
 public:
  ResponseRecord(std::size_t instances, std::size_t challenges, std::size_t trials,
                 std::size_t bits)
      : p_(instances), c_(challenges), tr_(trials), n_(bits), words_((bits + 63) / 64) {
    if (p_ == 0 || c_ == 0 || tr_ == 0 || n_ == 0)
      throw ConfigError("response record dimensions must be >= 1");
    data_.assign(p_ * c_ * tr_ * words_, 0);
  }

  std::size_t instances() const noexcept { return p_; }
  std::size_t challenges() const noexcept { return c_; }
  std::size_t trials() const noexcept { return tr_; }
  std::size_t bits() const noexcept { return n_; }

  void set(std::size_t i, std::size_t c, std::size_t t, std::size_t j, int bit) {
    check(i, c, t, j);
    auto& w = data_[offset(i, c, t) + j / 64];
    const std::uint64_t m = std::uint64_t{1} << (j % 64);
    w = bit ? (w | m) : (w & ~m);
  }

  int get(std::size_t i, std::size_t c, std::size_t t, std::size_t j) const {
    check(i, c, t, j);
    return static_cast<int>((data_[offset(i, c, t) + j / 64] >> (j % 64)) & 1u);
  }

  std::span<const std::uint64_t> response(std::size_t i, std::size_t c, std::size_t t) const {
    check(i, c, t, 0);
    return {data_.data() + offset(i, c, t), words_};
  }

  std::size_t weight(std::size_t i, std::size_t c, std::size_t t) const {
    std::size_t w = 0;
    for (auto word : response(i, c, t)) w += static_cast<std::size_t>(std::popcount(word));
    return w;
  }

  std::size_t distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) const {
    std::size_t d = 0;
    for (std::size_t k = 0; k < words_; ++k)
      d += static_cast<std::size_t>(std::popcount(a[k] ^ b[k]));
    return d;
  }

 private:
  std::size_t offset(std::size_t i, std::size_t c, std::size_t t) const noexcept {
    return ((i * c_ + c) * tr_ + t) * words_;
  }
  void check(std::size_t i, std::size_t c, std::size_t t, std::size_t j) const {
    if (i >= p_ || c >= c_ || t >= tr_ || j >= n_)
      throw RuntimeError("response record index out of range");
  }

  std::size_t p_, c_, tr_, n_, words_;
  std::vector<std::uint64_t> data_;
};

/// Fraction of ones in a single response, in percent.
inline double uniformity(std::span<const std::uint8_t> response) {
  if (response.empty()) throw ConfigError("uniformity of an empty response");
  std::size_t ones = 0;
  for (auto b : response) ones += b ? 1 : 0;
  return 100.0 * static_cast<double>(ones) / static_cast<double>(response.size());
}

inline double uniformity(const ResponseRecord& rec, std::size_t instance, std::size_t challenge,
                         std::size_t trial = 0) {
  return 100.0 * static_cast<double>(rec.weight(instance, challenge, trial)) /
         static_cast<double>(rec.bits());
}

/// Fraction of instances answering 1 at one response bit, in percent.
inline double bit_aliasing(const ResponseRecord& rec, std::size_t bit_index,
                           std::size_t challenge = 0, std::size_t trial = 0) {
  if (rec.instances() < 2) throw ConfigError("bit aliasing needs at least 2 instances");
  if (bit_index >= rec.bits()) throw RuntimeError("bit index out of range");
  std::size_t ones = 0;
  for (std::size_t i = 0; i < rec.instances(); ++i) ones += rec.get(i, challenge, trial, bit_index);
  return 100.0 * static_cast<double>(ones) / static_cast<double>(rec.instances());
}

/// Mean pairwise fractional Hamming distance between instances for one
/// challenge slot, in percent.
inline double uniqueness(const ResponseRecord& rec, std::size_t challenge, std::size_t trial = 0) {
  const std::size_t p = rec.instances();
  if (p < 2) throw ConfigError("uniqueness needs at least 2 instances");
  std::uint64_t total = 0;
  for (std::size_t i = 0; i + 1 < p; ++i)
    for (std::size_t j = i + 1; j < p; ++j)
      total += rec.distance(rec.response(i, challenge, trial), rec.response(j, challenge, trial));
  const double pairs = static_cast<double>(p) * static_cast<double>(p - 1) / 2.0;
  return 100.0 * static_cast<double>(total) / (pairs * static_cast<double>(rec.bits()));
}

/// Uniqueness averaged over every challenge slot of the record.
inline double uniqueness(const ResponseRecord& rec) {
  double sum = 0;
  for (std::size_t c = 0; c < rec.challenges(); ++c) sum += uniqueness(rec, c);
  return sum / static_cast<double>(rec.challenges());
}

/// Mean pairwise fractional Hamming distance between the responses of one
/// instance to different challenges, in percent.
inline double diffuseness(const ResponseRecord& rec, std::size_t instance,
                          std::size_t trial = 0) {
  const std::size_t c = rec.challenges();
  if (c < 2) throw ConfigError("diffuseness needs at least 2 challenges");
  if (instance >= rec.instances()) throw RuntimeError("instance index out of range");
  std::uint64_t total = 0;
  for (std::size_t a = 0; a + 1 < c; ++a) {
    const auto ra = rec.response(instance, a, trial);
    for (std::size_t b = a + 1; b < c; ++b) total += rec.distance(ra, rec.response(instance, b, trial));
  }
  const double pairs = static_cast<double>(c) * static_cast<double>(c - 1) / 2.0;
  return 100.0 * static_cast<double>(total) / (pairs * static_cast<double>(rec.bits()));
}

/// Mean pairwise fractional Hamming distance between repeated trials of one
/// challenge on one instance, in percent.
inline double bit_error_rate(const ResponseRecord& rec, std::size_t instance,
                             std::size_t challenge) {
  const std::size_t tr = rec.trials();
  if (tr < 2) throw ConfigError("bit error rate needs at least 2 trials");
  if (instance >= rec.instances() || challenge >= rec.challenges())
    throw RuntimeError("index out of range");
  // Pairwise HD summed per bit: a bit that is 1 in k of tr trials
  // disagrees in k * (tr - k) pairs.
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < rec.bits(); ++j) {
    std::uint64_t k = 0;
    for (std::size_t t = 0; t < tr; ++t) k += static_cast<std::uint64_t>(rec.get(instance, challenge, t, j));
    total += k * (tr - k);
  }
  const double pairs = static_cast<double>(tr) * static_cast<double>(tr - 1) / 2.0;
  return 100.0 * static_cast<double>(total) / (pairs * static_cast<double>(rec.bits()));
}

inline double reliability(double ber_percent) noexcept { return 100.0 - ber_percent; }

// ---------------------------------------------------------------------------
// Strict avalanche probes
// ---------------------------------------------------------------------------

/// Output transition rate (percent) indexed by (columns replaced j, rows
/// replaced k) relative to a reference selection.
struct SacMap {
  std::size_t max_j = 0;
  std::size_t max_k = 0;
  std::vector<double> rates;         // (max_j+1) x (max_k+1), row-major in j
  std::vector<std::uint64_t> trials;  // evaluations behind each rate

  double at(std::size_t j, std::size_t k) const { return rates.at(j * (max_k + 1) + k); }

  /// Largest |rate - 50%| over the grid, excluding the reference cell (0,0).
  double max_deviation() const {
    double worst = 0;
    for (std::size_t j = 0; j <= max_j; ++j)
      for (std::size_t k = 0; k <= max_k; ++k)
        if (j != 0 || k != 0) worst = std::max(worst, std::abs(at(j, k) - 50.0));
    return worst;
  }
};

namespace detail {

inline std::uint64_t choose_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline std::uint64_t row_variants(std::size_t rows, std::size_t k) {
  const std::uint64_t free = rows - 2;
  if (k == 0) return 1;
  if (k == 1) return 2 * free;
  return free * (free > 0 ? free - 1 : 0);
}

/// Calls fn(k-combination of [0,n)) for every combination in lexicographic
/// order.
template <class Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  while (true) {
    fn(std::as_const(idx));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t m = i; m < k; ++m) idx[m] = idx[m - 1] + 1;
  }
}

/// Picks k distinct values from pool without replacement.
inline std::vector<std::size_t> draw_distinct(std::vector<std::size_t> pool, std::size_t k,
                                              Stream& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const auto r = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[r]);
  }
  pool.resize(k);
  return pool;
}

inline std::vector<std::size_t> complement(std::size_t n, const std::vector<std::size_t>& used) {
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < n; ++v)
    if (std::find(used.begin(), used.end(), v) == used.end()) out.push_back(v);
  return out;
}

/// All selections at exactly (j, k) replaced indices from ref.
inline std::vector<Selection> enumerate_neighbours(const Selection& ref, std::size_t rows,
                                                   std::size_t cols, std::size_t j, std::size_t k) {
  const auto free_cols = complement(cols, ref.columns);
  const auto free_rows = complement(rows, {ref.row_p, ref.row_q});
  std::vector<std::vector<std::size_t>> column_sets;
  for_each_combination(ref.columns.size(), j, [&](const std::vector<std::size_t>& removed) {
    for_each_combination(free_cols.size(), j, [&](const std::vector<std::size_t>& added) {
      auto cols_new = ref.columns;
      for (std::size_t m = 0; m < j; ++m) cols_new[removed[m]] = free_cols[added[m]];
      column_sets.push_back(std::move(cols_new));
    });
  });
  std::vector<std::pair<std::size_t, std::size_t>> row_pairs;
  if (k == 0) {
    row_pairs.emplace_back(ref.row_p, ref.row_q);
  } else if (k == 1) {
    for (auto r : free_rows) row_pairs.emplace_back(r, ref.row_q);
    for (auto r : free_rows) row_pairs.emplace_back(ref.row_p, r);
  } else {
    for (auto r1 : free_rows)
      for (auto r2 : free_rows)
        if (r1 != r2) row_pairs.emplace_back(r1, r2);
  }
  std::vector<Selection> out;
  out.reserve(column_sets.size() * row_pairs.size());
  for (const auto& cset : column_sets)
    for (const auto& [p, q] : row_pairs) out.push_back({cset, p, q});
  return out;
}

inline Selection sample_neighbour(const Selection& ref, std::size_t rows, std::size_t cols,
                                  std::size_t j, std::size_t k, Stream& rng) {
  Selection s = ref;
  std::vector<std::size_t> positions(ref.columns.size());
  std::iota(positions.begin(), positions.end(), 0);
  const auto removed = draw_distinct(positions, j, rng);
  const auto added = draw_distinct(complement(cols, ref.columns), j, rng);
  for (std::size_t m = 0; m < j; ++m) s.columns[removed[m]] = added[m];
  const auto free_rows = complement(rows, {ref.row_p, ref.row_q});
  if (k == 1) {
    const auto r = draw_distinct(free_rows, 1, rng)[0];
    (rng.coin() ? s.row_p : s.row_q) = r;
  } else if (k == 2) {
    const auto r = draw_distinct(free_rows, 2, rng);
    s.row_p = r[0];
    s.row_q = r[1];
  }
  return s;
}

}  // namespace detail

/// Transition-rate map over the selection space around `reference`.
/// Responses are noise-free. Where the number of neighbours at (j,k) does
/// not exceed `samples`, all of them are enumerated and the rate is exact;
/// otherwise `samples` neighbours are drawn uniformly.
inline SacMap sac_map(const PufInstance& puf, const Environment& env, const Selection& reference,
                      std::size_t max_j, std::size_t max_k, std::size_t samples, Stream& rng,
                      Architecture arch = Architecture::dual) {
  const std::size_t rows = puf.rows();
  const std::size_t cols = puf.cols();
  reference.validate(rows, cols);
  if (samples < 1) throw ConfigError("sac_map needs samples >= 1");
  const std::size_t cs = reference.columns.size();
  if (max_j > cs) throw ConfigError("column transitions cannot exceed the selected column count");
  if (max_k > 2) throw ConfigError("row transitions cannot exceed 2");
  if (max_j > cols - cs) throw ConfigError("not enough unselected columns for requested transitions");
  if (max_k > rows - 2) throw ConfigError("not enough unselected rows for requested transitions");

  SacMap map{max_j, max_k, std::vector<double>((max_j + 1) * (max_k + 1), 0.0),
             std::vector<std::uint64_t>((max_j + 1) * (max_k + 1), 0)};
  const int ref_bit = evaluate_selection(puf, reference, env, arch);
  for (std::size_t j = 0; j <= max_j; ++j) {
    for (std::size_t k = 0; k <= max_k; ++k) {
      const std::uint64_t variants =
          detail::choose_u64(cs, j) * detail::choose_u64(cols - cs, j) * detail::row_variants(rows, k);
      std::uint64_t flips = 0;
      std::uint64_t n = 0;
      if (variants <= samples) {
        for (const auto& s : detail::enumerate_neighbours(reference, rows, cols, j, k)) {
          flips += evaluate_selection(puf, s, env, arch) != ref_bit;
          ++n;
        }
      } else {
        for (; n < samples; ++n)
          flips += evaluate_selection(puf, detail::sample_neighbour(reference, rows, cols, j, k, rng),
                                      env, arch) != ref_bit;
      }
      map.rates[j * (max_k + 1) + k] = 100.0 * static_cast<double>(flips) / static_cast<double>(n);
      map.trials[j * (max_k + 1) + k] = n;
    }
  }
  return map;
}

/// Flips `hd` distinct random bits of each base challenge and returns the
/// percentage of noise-free responses that change.
inline double sac_challenge_test(const PufInstance& puf, const Environment& env,
                                 std::span<const Challenge> base_challenges, unsigned hd,
                                 Stream& rng, Architecture arch = Architecture::dual) {
  if (hd > kChallengeBits) throw ConfigError("hd must be in [0, 64]");
  if (base_challenges.empty()) return 0.0;
  std::vector<std::size_t> positions(kChallengeBits);
  std::iota(positions.begin(), positions.end(), 0);
  std::size_t flips = 0;
  for (const auto& base : base_challenges) {
    Challenge probe = base;
    for (auto pos : detail::draw_distinct(positions, hd, rng)) probe = probe.flipped(static_cast<unsigned>(pos));
    flips += evaluate_noise_free(puf, base, env, arch) != evaluate_noise_free(puf, probe, env, arch);
  }
  return 100.0 * static_cast<double>(flips) / static_cast<double>(base_challenges.size());
}

/// `count` challenges, each within Hamming distance 1..max_hd of base.
inline std::vector<Challenge> correlated_challenges(Challenge base, std::size_t count,
                                                    unsigned max_hd, Stream& rng) {
  if (max_hd < 1 || max_hd > kChallengeBits) throw ConfigError("max_hd must be in [1, 64]");
  std::vector<std::size_t> positions(kChallengeBits);
  std::iota(positions.begin(), positions.end(), 0);
  std::vector<Challenge> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto hd = 1 + static_cast<std::size_t>(rng.below(max_hd));
    Challenge c = base;
    for (auto pos : detail::draw_distinct(positions, hd, rng)) c = c.flipped(static_cast<unsigned>(pos));
    out.push_back(c);
  }
  return out;
}

}  // namespace nrpuf
