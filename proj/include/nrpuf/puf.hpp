#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "nrpuf/crossbar.hpp"
#include "nrpuf/device.hpp"
#include "nrpuf/errors.hpp"
#include "nrpuf/lfsr.hpp"
#include "nrpuf/random.hpp"

namespace nrpuf {

/// 64-bit challenge word.
struct Challenge {
  std::uint64_t bits = 0;

  Challenge flipped(unsigned position) const noexcept {
    return {bits ^ (std::uint64_t{1} << (position & 63u))};
  }
  friend auto operator<=>(const Challenge&, const Challenge&) = default;
};

inline constexpr unsigned kChallengeBits = 64;

/// Offset standard deviation of a differential pair scaled from a reference
/// geometry: mismatch goes as 1/sqrt(W*L).
inline double pelgrom_offset(double sigma_ref, double w, double l, double w_ref, double l_ref) {
  if (!(w > 0 && l > 0 && w_ref > 0 && l_ref > 0))
    throw ConfigError("transistor dimensions must be > 0");
  return sigma_ref * std::sqrt((w_ref * l_ref) / (w * l));
}

/// Behavioural comparator. offset_value is a manufacturing property drawn
/// once per instance; currents closer than sense_margin resolve randomly.
struct ComparatorParams {
  double offset_sigma = 5e-9;
  double sense_margin = 20e-9;
  double offset_value = 0;

  friend bool operator==(const ComparatorParams&, const ComparatorParams&) = default;
};

inline int msal_compare(double i_p, double i_q, const ComparatorParams& comp, Stream& rng) {
  const double delta = (i_p - i_q) + comp.offset_value;
  if (std::abs(delta) > comp.sense_margin) return delta > 0 ? 1 : 0;
  return rng.coin() ? 1 : 0;
}

/// Margin-free decision used for noise-free probing.
inline int compare_noise_free(double i_p, double i_q, const ComparatorParams& comp) noexcept {
  return (i_p - i_q) + comp.offset_value > 0 ? 1 : 0;
}

/// CMOS-side power terms. latch_bit_w is the extra dissipation of the
/// output stage when the response resolves to 1.
struct PowerModel {
  double baseline_w = 0;
  double noise_w = 5e-9;
  double latch_bit_w = 200e-9;

  friend bool operator==(const PowerModel&, const PowerModel&) = default;
};

/// Everything needed to manufacture instances.
struct PufConfig {
  std::size_t rows = 128;
  std::size_t cols = 128;
  std::size_t dummy_rows = 128;
  std::size_t dummy_cols = 128;
  std::size_t cs = 5;
  DeviceParams device{};
  double offset_sigma = 5e-9;
  double sense_margin = 20e-9;
  PowerModel power{};

  void validate() const {
    device.validate();
    if (rows < 2) throw ConfigError("array needs at least 2 rows");
    if (cols < 1 || dummy_rows < 1 || dummy_cols < 1)
      throw ConfigError("array dimensions must be >= 1");
    if (cs < 1 || cs > kMaxColumnsSelected) throw ConfigError("cs must be in [1,5]");
    if (cs > cols) throw ConfigError("cs must not exceed the number of columns");
    if (!(offset_sigma >= 0)) throw ConfigError("offset_sigma must be >= 0");
    if (!(sense_margin >= 0)) throw ConfigError("sense_margin must be >= 0");
    if (!(power.baseline_w >= 0 && power.noise_w >= 0 && power.latch_bit_w >= 0))
      throw ConfigError("power terms must be >= 0");
  }

  friend bool operator==(const PufConfig&, const PufConfig&) = default;
};

enum class ArrayId { a, b };

/// The two-crossbar PUF plus its dummy array. Immutable once built; cs and
/// the sense margin are operating knobs and may be changed on a copy.
struct PufInstance {
  CrossbarArray cba_a;
  CrossbarArray cba_b;
  CrossbarArray dummy;
  ComparatorParams comp_a;
  ComparatorParams comp_b;
  DeviceParams device;
  PowerModel power;
  std::size_t cs = 5;
  std::size_t hidden_width = 1;
  std::uint64_t instance_seed = 0;

  std::size_t rows() const noexcept { return cba_a.rows(); }
  std::size_t cols() const noexcept { return cba_a.cols(); }

  PufInstance with_cs(std::size_t new_cs) const {
    if (new_cs < 1 || new_cs > kMaxColumnsSelected || new_cs > cols())
      throw ConfigError("cs must be in [1, min(5, cols)]");
    PufInstance copy = *this;
    copy.cs = new_cs;
    return copy;
  }
  PufInstance with_sense_margin(double margin) const {
    if (!(margin >= 0)) throw ConfigError("sense_margin must be >= 0");
    PufInstance copy = *this;
    copy.comp_a.sense_margin = margin;
    copy.comp_b.sense_margin = margin;
    return copy;
  }

  void validate() const {
    if (cba_a.rows() != cba_b.rows() || cba_a.cols() != cba_b.cols())
      throw ConfigError("crossbars A and B must have equal dimensions");
    if (cba_a.rows() < 2) throw ConfigError("crossbars need at least 2 rows");
    if (cs < 1 || cs > kMaxColumnsSelected || cs > cba_a.cols())
      throw ConfigError("cs must be in [1, min(5, cols)]");
    if (hidden_width != 1) throw ConfigError("hidden challenge width is fixed at 1");
    if (dummy.size() == 0) throw ConfigError("dummy array must be non-empty");
    device.validate();
  }

  friend bool operator==(const PufInstance&, const PufInstance&) = default;
};

inline PufInstance make_puf(const PufConfig& cfg, std::uint64_t instance_seed) {
  cfg.validate();
  Stream ra(derive_seed(instance_seed, StreamTag::array_a));
  Stream rb(derive_seed(instance_seed, StreamTag::array_b));
  Stream rd(derive_seed(instance_seed, StreamTag::array_dummy));
  Stream ca(derive_seed(instance_seed, StreamTag::comparator_a));
  Stream cb(derive_seed(instance_seed, StreamTag::comparator_b));
  PufInstance puf{
      .cba_a = build_array(cfg.rows, cfg.cols, cfg.device, ra),
      .cba_b = build_array(cfg.rows, cfg.cols, cfg.device, rb),
      .dummy = build_array(cfg.dummy_rows, cfg.dummy_cols, cfg.device, rd),
      .comp_a = {cfg.offset_sigma, cfg.sense_margin, normal(ca, 0.0, cfg.offset_sigma)},
      .comp_b = {cfg.offset_sigma, cfg.sense_margin, normal(cb, 0.0, cfg.offset_sigma)},
      .device = cfg.device,
      .power = cfg.power,
      .cs = cfg.cs,
      .hidden_width = 1,
      .instance_seed = instance_seed,
  };
  return puf;
}

// ---------------------------------------------------------------------------
// Challenge expansion
//
// Array A: the LFSR is seeded with the challenge. Successive 64-bit words are
// reduced modulo the column count (then the row count), skipping repeats,
// until cs columns and two rows are collected.
//
// Array B: the register state left behind by A's draws is XORed with a
// whitening mask and the hidden bit (bit 0), and the same procedure runs
// again. Seeding B from the continued state rather than from the raw
// challenge lets B depend on challenge bits that A's first words did not
// reach.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kWhiteningMask = 0x5DEECE66DA3B1F27ULL;

struct Expansion {
  Selection selection;
  std::uint64_t final_state = 0;
};

inline Expansion expand_from_state(std::uint64_t seed, std::size_t cs, std::size_t rows,
                                   std::size_t cols) {
  if (cs < 1 || cs > kMaxColumnsSelected || cs > cols)
    throw ConfigError("cs must be in [1, min(5, cols)]");
  if (rows < 2) throw ConfigError("need at least two rows");
  Lfsr64 lfsr(seed);
  Expansion out;
  out.selection.columns.reserve(cs);
  auto& columns = out.selection.columns;
  while (columns.size() < cs) {
    const auto c = static_cast<std::size_t>(lfsr.next_word() % cols);
    if (std::find(columns.begin(), columns.end(), c) == columns.end()) columns.push_back(c);
  }
  out.selection.row_p = static_cast<std::size_t>(lfsr.next_word() % rows);
  do {
    out.selection.row_q = static_cast<std::size_t>(lfsr.next_word() % rows);
  } while (out.selection.row_q == out.selection.row_p);
  out.final_state = lfsr.state();
  return out;
}

inline Selection expand_challenge(Challenge challenge, std::optional<int> hidden_bit, ArrayId id,
                                  std::size_t cs, std::size_t rows, std::size_t cols) {
  if (id == ArrayId::a) {
    if (hidden_bit) throw ConfigError("array A takes no hidden bit");
    return expand_from_state(challenge.bits, cs, rows, cols).selection;
  }
  if (!hidden_bit || (*hidden_bit != 0 && *hidden_bit != 1))
    throw ConfigError("array B requires a hidden bit of 0 or 1");
  const auto a = expand_from_state(challenge.bits, cs, rows, cols);
  const std::uint64_t seed = a.final_state ^ kWhiteningMask ^ static_cast<std::uint64_t>(*hidden_bit);
  return expand_from_state(seed, cs, rows, cols).selection;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// Dual: response comes from array B steered by A's hidden bit.
/// Single: A's bit is the response (no hidden challenge).
enum class Architecture { dual, single };

struct EvalOutcome {
  int bit = 0;
  int hidden_bit = 0;
  double i_p = 0;
  double i_q = 0;
  double i_d = 0;
  double power = 0;
  // Array A currents, kept for power accounting and diagnostics.
  double i_p_a = 0;
  double i_q_a = 0;
};

namespace detail {

/// One realisation of the supply and temperature for a single evaluation.
/// The global supply error and the temperature are shared by every cell
/// read; each driven column line adds its own local supply error.
struct OperatingPoint {
  double global_voltage = 0;
  double temperature = 0;
  double column_sigma = 0;  // absolute (volts)
};

inline OperatingPoint draw_operating_point(const Environment& env, Stream& rng) {
  const double share = env.column_supply_share;
  const double global_frac = normal(rng, 0.0, env.supply_sigma_frac * std::sqrt(1.0 - share));
  OperatingPoint op;
  op.global_voltage = env.read_voltage * (1.0 + global_frac);
  op.column_sigma = env.read_voltage * env.supply_sigma_frac * std::sqrt(share);
  op.temperature =
      env.temperature + (env.temp_jitter > 0 ? env.temp_jitter * (2.0 * rng.uniform01() - 1.0) : 0);
  return op;
}

struct PairCurrents {
  double i_p = 0;
  double i_q = 0;
};

inline PairCurrents read_pair(const CrossbarArray& array, const DeviceParams& params,
                              const Selection& sel, const OperatingPoint& op, Stream& rng) {
  std::array<double, kMaxColumnsSelected> volts{};
  for (std::size_t k = 0; k < sel.columns.size(); ++k)
    volts[k] = op.global_voltage + normal(rng, 0.0, op.column_sigma);
  const std::span<const double> v(volts.data(), sel.columns.size());
  return {row_current_at(array, params, sel.row_p, sel.columns, v, op.temperature),
          row_current_at(array, params, sel.row_q, sel.columns, v, op.temperature)};
}

/// Sum over `count` distinct dummy cells drawn uniformly. Draws are
/// sequential, so the first k cells do not depend on count.
inline double dummy_current(const PufInstance& puf, std::size_t count, double voltage,
                            double temperature, Stream& rng) {
  if (count == 0) return 0;
  const std::size_t n = puf.dummy.size();
  if (count > n) throw ConfigError("dummy_count exceeds dummy array size");
  std::vector<std::size_t> picked;
  picked.reserve(count);
  double sum = 0;
  const double factor = voltage * transport_factor(puf.device, voltage, temperature);
  while (picked.size() < count) {
    const auto idx = static_cast<std::size_t>(rng.below(n));
    if (std::find(picked.begin(), picked.end(), idx) != picked.end()) continue;
    picked.push_back(idx);
    sum += factor / puf.dummy.cells()[idx].base_resistance;
  }
  return sum;
}

}  // namespace detail

inline EvalOutcome evaluate_bit(const PufInstance& puf, Challenge challenge,
                                const Environment& env, std::size_t dummy_count, Stream& rng,
                                Architecture arch = Architecture::dual) {
  if (dummy_count > puf.dummy.size())
    throw ConfigError("dummy_count exceeds dummy array size");
  // Children first, so dummy and noise draws do not shift with the
  // data-dependent number of comparator coin flips.
  Stream dummy_rng = rng.split();
  Stream noise_rng = rng.split();
  const auto op = detail::draw_operating_point(env, rng);

  EvalOutcome out;
  const auto exp_a = expand_from_state(challenge.bits, puf.cs, puf.rows(), puf.cols());
  const auto a = detail::read_pair(puf.cba_a, puf.device, exp_a.selection, op, rng);
  out.i_p_a = a.i_p;
  out.i_q_a = a.i_q;
  out.hidden_bit = msal_compare(a.i_p, a.i_q, puf.comp_a, rng);

  double array_current = a.i_p + a.i_q;
  if (arch == Architecture::dual) {
    const std::uint64_t seed_b =
        exp_a.final_state ^ kWhiteningMask ^ static_cast<std::uint64_t>(out.hidden_bit);
    const auto sel_b = expand_from_state(seed_b, puf.cs, puf.rows(), puf.cols()).selection;
    const auto b = detail::read_pair(puf.cba_b, puf.device, sel_b, op, rng);
    out.i_p = b.i_p;
    out.i_q = b.i_q;
    out.bit = msal_compare(b.i_p, b.i_q, puf.comp_b, rng);
    array_current += b.i_p + b.i_q;
  } else {
    out.i_p = a.i_p;
    out.i_q = a.i_q;
    out.bit = out.hidden_bit;
  }

  out.i_d = detail::dummy_current(puf, dummy_count, op.global_voltage, op.temperature, dummy_rng);
  const double p = env.read_voltage * (array_current + out.i_d) + puf.power.baseline_w +
                   (out.bit ? puf.power.latch_bit_w : 0.0) +
                   normal(noise_rng, 0.0, puf.power.noise_w);
  out.power = std::max(0.0, p);
  return out;
}

/// Response bit without any temporal noise and without the metastable band:
/// nominal operating point, sign(dI + offset).
inline int evaluate_noise_free(const PufInstance& puf, Challenge challenge,
                               const Environment& env, Architecture arch = Architecture::dual) {
  const double v = env.read_voltage;
  const double t = env.temperature;
  std::array<double, kMaxColumnsSelected> volts;
  volts.fill(v);
  auto compare = [&](const CrossbarArray& array, const Selection& sel, const ComparatorParams& c) {
    const std::span<const double> vs(volts.data(), sel.columns.size());
    return compare_noise_free(row_current_at(array, puf.device, sel.row_p, sel.columns, vs, t),
                              row_current_at(array, puf.device, sel.row_q, sel.columns, vs, t), c);
  };
  const auto exp_a = expand_from_state(challenge.bits, puf.cs, puf.rows(), puf.cols());
  const int hidden = compare(puf.cba_a, exp_a.selection, puf.comp_a);
  if (arch == Architecture::single) return hidden;
  const std::uint64_t seed_b =
      exp_a.final_state ^ kWhiteningMask ^ static_cast<std::uint64_t>(hidden);
  const auto sel_b = expand_from_state(seed_b, puf.cs, puf.rows(), puf.cols()).selection;
  return compare(puf.cba_b, sel_b, puf.comp_b);
}

/// Rotates every index of a selection by half the array. This is how the
/// hidden bit steers array B when the selection space is probed directly
/// (bypassing challenge expansion).
inline Selection displace_half(const Selection& sel, std::size_t rows, std::size_t cols) {
  Selection out = sel;
  for (auto& c : out.columns) c = (c + cols / 2) % cols;
  out.row_p = (sel.row_p + rows / 2) % rows;
  out.row_q = (sel.row_q + rows / 2) % rows;
  return out;
}

/// Evaluation substream for one (instance, challenge, trial) triple.
inline Stream evaluation_stream(const PufInstance& puf, Challenge challenge, std::uint64_t trial) {
  return Stream(derive_seed(puf.instance_seed, StreamTag::evaluation, {challenge.bits, trial}));
}

/// Noise-free response to an explicit selection. In the dual architecture
/// array A reads `sel`; array B reads `sel` when the hidden bit is 0 and
/// displace_half(sel) when it is 1.
inline int evaluate_selection(const PufInstance& puf, const Selection& sel, const Environment& env,
                              Architecture arch) {
  sel.validate(puf.rows(), puf.cols());
  const double v = env.read_voltage;
  const double t = env.temperature;
  std::array<double, kMaxColumnsSelected> volts;
  volts.fill(v);
  const std::span<const double> vs(volts.data(), sel.columns.size());
  auto compare = [&](const CrossbarArray& array, const Selection& s, const ComparatorParams& c) {
    return compare_noise_free(row_current_at(array, puf.device, s.row_p, s.columns, vs, t),
                              row_current_at(array, puf.device, s.row_q, s.columns, vs, t), c);
  };
  const int hidden = compare(puf.cba_a, sel, puf.comp_a);
  if (arch == Architecture::single) return hidden;
  return compare(puf.cba_b, hidden ? displace_half(sel, puf.rows(), puf.cols()) : sel, puf.comp_b);
}

}  // namespace nrpuf
