#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "nrpuf/config.hpp"
#include "nrpuf/errors.hpp"
#include "nrpuf/metrics.hpp"
#include "nrpuf/power.hpp"
#include "nrpuf/puf.hpp"
#include "nrpuf/random.hpp"

namespace nrpuf {

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct Histogram {
  double lo = 0;
  double hi = 100;
  std::vector<std::uint64_t> counts;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  ExperimentKind kind = ExperimentKind::metrics;
  ExperimentConfig config;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, Histogram>> distributions;
  std::vector<std::pair<std::string, Table>> tables;
  // Extra files written next to the report (e.g. power traces).
  std::vector<std::pair<std::string, std::string>> attachments;

  double scalar(const std::string& name) const {
    for (const auto& [k, v] : scalars)
      if (k == name) return v;
    throw RuntimeError("report has no scalar '" + name + "'");
  }
  const Table& table(const std::string& name) const {
    for (const auto& [k, t] : tables)
      if (k == name) return t;
    throw RuntimeError("report has no table '" + name + "'");
  }
};

inline Histogram make_histogram(std::span<const double> values, std::size_t bins, double lo = 0,
                                double hi = 100) {
  Histogram h{lo, hi, std::vector<std::uint64_t>(bins, 0)};
  for (double v : values) {
    const double t = (v - lo) / (hi - lo) * static_cast<double>(bins);
    const auto b = static_cast<std::ptrdiff_t>(std::floor(t));
    h.counts[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1))]++;
  }
  return h;
}

inline Json report_to_json(const Report& r) {
  Json scalars = Json::object();
  for (const auto& [k, v] : r.scalars) scalars[k] = v;
  Json dists = Json::object();
  for (const auto& [k, h] : r.distributions)
    dists[k] = Json{{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
  Json tables = Json::object();
  for (const auto& [k, t] : r.tables) tables[k] = Json{{"columns", t.columns}, {"rows", t.rows}};
  return Json{{"kind", to_string(r.kind)},
              {"config", to_json(r.config)},
              {"scalars", scalars},
              {"distributions", dists},
              {"tables", tables}};
}

namespace detail {

// Shortest decimal string that parses back to the same double.
inline std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

inline std::string table_csv(const Table& t) {
  std::string s;
  for (std::size_t i = 0; i < t.columns.size(); ++i) s += (i ? "," : "") + t.columns[i];
  s += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + fmt(row[i]);
    s += '\n';
  }
  return s;
}

}  // namespace detail

enum class ReportFormat { json, csv };

inline ReportFormat parse_format(const std::string& s) {
  if (s == "json") return ReportFormat::json;
  if (s == "csv") return ReportFormat::csv;
  throw ConfigError("unknown report format '" + s + "'");
}

/// JSON: report.json. CSV: config.json, scalars.csv, one file per table and
/// per histogram. Attachments are written in both cases.
inline void write_report(const Report& r, const std::filesystem::path& dir, ReportFormat format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create output directory '" + dir.string() + "': " + ec.message());
  if (format == ReportFormat::json) {
    detail::write_file(dir / "report.json", report_to_json(r).dump(2) + "\n");
  } else {
    detail::write_file(dir / "config.json", serialize_config(r.config) + "\n");
    std::string s = "name,value\n";
    for (const auto& [k, v] : r.scalars) s += k + "," + detail::fmt(v) + "\n";
    detail::write_file(dir / "scalars.csv", s);
    for (const auto& [k, t] : r.tables) detail::write_file(dir / (k + ".csv"), detail::table_csv(t));
    for (const auto& [k, h] : r.distributions) {
      std::string hs = "bin_lo,bin_hi,count\n";
      const double w = (h.hi - h.lo) / static_cast<double>(h.counts.size());
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        hs += detail::fmt(h.lo + w * static_cast<double>(b)) + "," +
              detail::fmt(h.lo + w * static_cast<double>(b + 1)) + "," + std::to_string(h.counts[b]) + "\n";
      detail::write_file(dir / ("hist_" + k + ".csv"), hs);
    }
  }
  for (const auto& [name, text] : r.attachments) detail::write_file(dir / name, text);
}

// ---------------------------------------------------------------------------
// Execution helpers
// ---------------------------------------------------------------------------

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index is
/// handled exactly once; callers write results into slot i, so the outcome
/// does not depend on scheduling. The exception of the lowest failing index
/// is rethrown.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  if (n == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline std::uint64_t instance_seed(std::uint64_t master_seed, std::size_t index) {
  return derive_seed(master_seed, StreamTag::instance, {index});
}

inline std::vector<Challenge> random_challenges(Stream& rng, std::size_t count) {
  std::vector<Challenge> out(count);
  for (auto& c : out) c.bits = rng();
  return out;
}

struct MeanStd {
  double mean = 0;
  double std = 0;
};

/// Sample mean and (n-1) standard deviation; std is 0 for a single value.
inline MeanStd mean_std(std::span<const double> v) {
  if (v.empty()) return {};
  const double n = static_cast<double>(v.size());
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return {m, v.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0};
}

/// Uniformity over challenge sets clustered around a random base
/// (every member within Hamming distance max_hd). Returns one UF per set.
inline std::vector<double> worst_case_uniformity(const PufInstance& puf, const Environment& env,
                                                 std::size_t sets, std::size_t bits, unsigned max_hd,
                                                 Stream& rng, Architecture arch, bool noisy) {
  std::vector<double> out;
  out.reserve(sets);
  for (std::size_t s = 0; s < sets; ++s) {
    const Challenge base{rng()};
    std::size_t ones = 0;
    for (const auto& ch : correlated_challenges(base, bits, max_hd, rng)) {
      if (noisy) {
        Stream er = evaluation_stream(puf, ch, 0);
        ones += static_cast<std::size_t>(evaluate_bit(puf, ch, env, 0, er, arch).bit);
      } else {
        ones += static_cast<std::size_t>(evaluate_noise_free(puf, ch, env, arch));
      }
    }
    out.push_back(100.0 * static_cast<double>(ones) / static_cast<double>(bits));
  }
  return out;
}

inline double mean_abs_deviation_from_half(std::span<const double> uf) {
  double s = 0;
  for (double u : uf) s += std::abs(u - 50.0);
  return uf.empty() ? 0.0 : s / static_cast<double>(uf.size());
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

/// Response bit j of challenge slot c is the output for challenge
/// c * n + j of a shared challenge list, so every instance answers the same
/// challenges.
inline Report run_metrics_suite(const ExperimentConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  const auto pcfg = cfg.resolved_puf();
  const auto& k = cfg.counts;
  const std::size_t p = k.instances, c = k.challenges, tr = k.trials, n = k.response_bits;

  Stream cr(derive_seed(cfg.master_seed, StreamTag::challenges));
  const auto challenges = random_challenges(cr, c * n);

  ResponseRecord rec(p, c, tr, n);
  std::vector<std::vector<double>> wc_dual(p), wc_single(p);
  parallel_for(p, workers, [&](std::size_t i) {
    const auto puf = make_puf(pcfg, instance_seed(cfg.master_seed, i));
    for (std::size_t s = 0; s < c; ++s)
      for (std::size_t t = 0; t < tr; ++t)
        for (std::size_t j = 0; j < n; ++j) {
          const auto& ch = challenges[s * n + j];
          Stream rng = evaluation_stream(puf, ch, t);
          rec.set(i, s, t, j, evaluate_bit(puf, ch, cfg.environment, k.dummy_count, rng).bit);
        }
    // Same correlated sets for both architectures.
    Stream wr(derive_seed(puf.instance_seed, StreamTag::challenges, {1}));
    Stream wr2 = wr;
    wc_dual[i] = worst_case_uniformity(puf, cfg.environment, cfg.worst_case.sets, n,
                                       cfg.worst_case.max_hd, wr, Architecture::dual, true);
    wc_single[i] = worst_case_uniformity(puf, cfg.environment, cfg.worst_case.sets, n,
                                         cfg.worst_case.max_hd, wr2, Architecture::single, true);
  });

  std::vector<double> uf;
  uf.reserve(p * c);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t s = 0; s < c; ++s) uf.push_back(uniformity(rec, i, s));

  std::vector<double> ba;
  ba.reserve(c * n);
  for (std::size_t s = 0; s < c; ++s)
    for (std::size_t j = 0; j < n; ++j) ba.push_back(bit_aliasing(rec, j, s));

  // Uniqueness per instance pair, averaged over challenge slots.
  std::vector<double> uq;
  uq.reserve(p * (p - 1) / 2);
  for (std::size_t a = 0; a + 1 < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b) {
      std::uint64_t d = 0;
      for (std::size_t s = 0; s < c; ++s) d += rec.distance(rec.response(a, s, 0), rec.response(b, s, 0));
      uq.push_back(100.0 * static_cast<double>(d) / static_cast<double>(c * n));
    }

  std::vector<double> df(p, 0.0);
  if (c >= 2) parallel_for(p, workers, [&](std::size_t i) { df[i] = diffuseness(rec, i); });

  std::vector<double> wcd, wcs;
  for (std::size_t i = 0; i < p; ++i) {
    wcd.insert(wcd.end(), wc_dual[i].begin(), wc_dual[i].end());
    wcs.insert(wcs.end(), wc_single[i].begin(), wc_single[i].end());
  }

  Report r{ExperimentKind::metrics, cfg, {}, {}, {}, {}};
  auto put = [&](const std::string& name, std::span<const double> v) {
    const auto ms = mean_std(v);
    r.scalars.emplace_back(name + "_mean", ms.mean);
    r.scalars.emplace_back(name + "_std", ms.std);
    r.distributions.emplace_back(name, make_histogram(v, cfg.histogram_bins));
  };
  put("uf_best", uf);
  put("uf_worst_dual", wcd);
  put("uf_worst_single", wcs);
  r.scalars.emplace_back("uf_worst_deviation_dual", mean_abs_deviation_from_half(wcd));
  r.scalars.emplace_back("uf_worst_deviation_single", mean_abs_deviation_from_half(wcs));
  put("ba", ba);
  put("uq", uq);
  if (c >= 2) put("df", df);
  if (tr >= 2) {
    std::vector<double> ber;
    ber.reserve(p * c);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t s = 0; s < c; ++s) ber.push_back(bit_error_rate(rec, i, s));
    put("ber", ber);
    r.scalars.emplace_back("reliability_mean", reliability(mean_std(ber).mean));
  }

  Table per_instance{{"instance", "uf_best_mean", "df"}, {}};
  for (std::size_t i = 0; i < p; ++i) {
    const auto ms = mean_std(std::span<const double>(uf).subspan(i * c, c));
    per_instance.rows.push_back({static_cast<double>(i), ms.mean, df[i]});
  }
  r.tables.emplace_back("per_instance", std::move(per_instance));
  return r;
}

/// Mean BER over a CS x sense-margin grid. Every grid point reuses the
/// evaluation substream of each (instance, challenge, trial), so differences
/// between points come from the knobs rather than from resampling.
inline Report run_reliability_sweep(const ExperimentConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  const auto pcfg = cfg.resolved_puf();
  const auto& k = cfg.counts;
  const auto& cs_values = cfg.reliability.cs_values;
  const auto& margins = cfg.reliability.margins;
  const std::size_t grid = cs_values.size() * margins.size();

  Stream cr(derive_seed(cfg.master_seed, StreamTag::challenges));
  const auto challenges = random_challenges(cr, k.challenges);

  // ber[i][g]: mean BER of instance i at grid point g.
  std::vector<std::vector<double>> ber(k.instances, std::vector<double>(grid, 0.0));
  parallel_for(k.instances, workers, [&](std::size_t i) {
    const auto base = make_puf(pcfg, instance_seed(cfg.master_seed, i));
    for (std::size_t a = 0; a < cs_values.size(); ++a) {
      for (std::size_t b = 0; b < margins.size(); ++b) {
        const auto puf = base.with_cs(cs_values[a]).with_sense_margin(margins[b]);
        ResponseRecord rec(1, k.challenges, k.trials, 1);
        for (std::size_t s = 0; s < k.challenges; ++s)
          for (std::size_t t = 0; t < k.trials; ++t) {
            Stream rng = evaluation_stream(puf, challenges[s], t);
            rec.set(0, s, t, 0, evaluate_bit(puf, challenges[s], cfg.environment, k.dummy_count, rng).bit);
          }
        double sum = 0;
        for (std::size_t s = 0; s < k.challenges; ++s) sum += bit_error_rate(rec, 0, s);
        ber[i][a * margins.size() + b] = sum / static_cast<double>(k.challenges);
      }
    }
  });

  Report r{ExperimentKind::reliability, cfg, {}, {}, {}, {}};
  Table t{{"cs", "margin_a", "ber_mean", "ber_std", "reliability_mean"}, {}};
  for (std::size_t a = 0; a < cs_values.size(); ++a)
    for (std::size_t b = 0; b < margins.size(); ++b) {
      std::vector<double> v(k.instances);
      for (std::size_t i = 0; i < k.instances; ++i) v[i] = ber[i][a * margins.size() + b];
      const auto ms = mean_std(v);
      t.rows.push_back({static_cast<double>(cs_values[a]), margins[b], ms.mean, ms.std,
                        reliability(ms.mean)});
    }
  std::vector<double> all;
  for (const auto& v : ber) all.insert(all.end(), v.begin(), v.end());
  r.scalars.emplace_back("ber_grid_mean", mean_std(all).mean);
  r.distributions.emplace_back("ber_instance_grid", make_histogram(all, cfg.histogram_bins, 0, 10));
  r.tables.emplace_back("ber_grid", std::move(t));
  return r;
}

namespace detail {

/// Accumulates flip counts of several maps on the same grid.
struct SacAccumulator {
  std::size_t max_j = 0, max_k = 0;
  std::vector<double> flips;
  std::vector<std::uint64_t> trials;

  void add(const SacMap& m) {
    if (flips.empty()) {
      max_j = m.max_j;
      max_k = m.max_k;
      flips.assign(m.rates.size(), 0.0);
      trials.assign(m.rates.size(), 0);
    }
    for (std::size_t g = 0; g < m.rates.size(); ++g) {
      flips[g] += m.rates[g] / 100.0 * static_cast<double>(m.trials[g]);
      trials[g] += m.trials[g];
    }
  }
  void add(const SacAccumulator& o) {
    if (o.flips.empty()) return;
    if (flips.empty()) {
      *this = o;
      return;
    }
    for (std::size_t g = 0; g < flips.size(); ++g) {
      flips[g] += o.flips[g];
      trials[g] += o.trials[g];
    }
  }
  SacMap map() const {
    SacMap m{max_j, max_k, std::vector<double>(flips.size()), trials};
    for (std::size_t g = 0; g < flips.size(); ++g)
      m.rates[g] = trials[g] ? 100.0 * std::round(flips[g]) / static_cast<double>(trials[g]) : 0.0;
    return m;
  }
};

inline Table sac_table(const SacMap& m) {
  Table t{{"columns_replaced", "rows_replaced", "rate", "trials"}, {}};
  for (std::size_t j = 0; j <= m.max_j; ++j)
    for (std::size_t k = 0; k <= m.max_k; ++k)
      t.rows.push_back({static_cast<double>(j), static_cast<double>(k), m.at(j, k),
                        static_cast<double>(m.trials[j * (m.max_k + 1) + k])});
  return t;
}

}  // namespace detail

/// Selection-level SAC maps and challenge-level avalanche for the nrPUF
/// and the single-crossbar baseline built from the same arrays. All
/// responses are noise-free.
inline Report run_sac_experiment(const ExperimentConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  const auto pcfg = cfg.resolved_puf();
  const auto& sc = cfg.sac;
  const std::size_t p = cfg.counts.instances;
  const std::size_t n = cfg.counts.response_bits;
  const auto& env = cfg.environment;

  struct PerInstance {
    detail::SacAccumulator dual, single;
    double dev_dual = 0, dev_single = 0;
    std::vector<double> hd_dual, hd_single;
    std::vector<double> wc_dual, wc_single;
  };
  std::vector<PerInstance> res(p);
  parallel_for(p, workers, [&](std::size_t i) {
    const auto puf = make_puf(pcfg, instance_seed(cfg.master_seed, i));
    auto& out = res[i];
    for (std::size_t ref = 0; ref < sc.references; ++ref) {
      Stream rr(derive_seed(puf.instance_seed, StreamTag::reference, {ref}));
      const auto reference = expand_from_state(rr(), puf.cs, puf.rows(), puf.cols()).selection;
      Stream s1(derive_seed(puf.instance_seed, StreamTag::sac, {ref}));
      Stream s2 = s1;
      out.dual.add(sac_map(puf, env, reference, puf.cs, sc.max_k, sc.samples, s1, Architecture::dual));
      out.single.add(sac_map(puf, env, reference, puf.cs, sc.max_k, sc.samples, s2, Architecture::single));
    }
    out.dev_dual = out.dual.map().max_deviation();
    out.dev_single = out.single.map().max_deviation();

    Stream br(derive_seed(puf.instance_seed, StreamTag::challenges, {2}));
    const auto bases = random_challenges(br, sc.base_challenges);
    for (auto hd : sc.hd_values) {
      Stream h1(derive_seed(puf.instance_seed, StreamTag::sac, {1000000 + hd}));
      Stream h2 = h1;
      out.hd_dual.push_back(sac_challenge_test(puf, env, bases, hd, h1, Architecture::dual));
      out.hd_single.push_back(sac_challenge_test(puf, env, bases, hd, h2, Architecture::single));
    }

    Stream wr(derive_seed(puf.instance_seed, StreamTag::challenges, {1}));
    Stream wr2 = wr;
    out.wc_dual = worst_case_uniformity(puf, env, cfg.worst_case.sets, n, cfg.worst_case.max_hd, wr,
                                        Architecture::dual, false);
    out.wc_single = worst_case_uniformity(puf, env, cfg.worst_case.sets, n, cfg.worst_case.max_hd, wr2,
                                          Architecture::single, false);
  });

  detail::SacAccumulator dual, single;
  std::vector<double> wcd, wcs;
  for (const auto& o : res) {
    dual.add(o.dual);
    single.add(o.single);
    wcd.insert(wcd.end(), o.wc_dual.begin(), o.wc_dual.end());
    wcs.insert(wcs.end(), o.wc_single.begin(), o.wc_single.end());
  }
  const auto map_dual = dual.map();
  const auto map_single = single.map();

  Report r{ExperimentKind::sac, cfg, {}, {}, {}, {}};
  r.scalars.emplace_back("sac_max_deviation_dual", map_dual.max_deviation());
  r.scalars.emplace_back("sac_max_deviation_single", map_single.max_deviation());
  r.scalars.emplace_back("uf_worst_deviation_dual", mean_abs_deviation_from_half(wcd));
  r.scalars.emplace_back("uf_worst_deviation_single", mean_abs_deviation_from_half(wcs));
  r.scalars.emplace_back("uf_worst_dual_mean", mean_std(wcd).mean);
  r.scalars.emplace_back("uf_worst_single_mean", mean_std(wcs).mean);
  r.distributions.emplace_back("uf_worst_dual", make_histogram(wcd, cfg.histogram_bins));
  r.distributions.emplace_back("uf_worst_single", make_histogram(wcs, cfg.histogram_bins));
  r.tables.emplace_back("sac_map_dual", detail::sac_table(map_dual));
  r.tables.emplace_back("sac_map_single", detail::sac_table(map_single));

  Table hd{{"hd", "transition_dual", "transition_single"}, {}};
  for (std::size_t h = 0; h < sc.hd_values.size(); ++h) {
    std::vector<double> d(p), s(p);
    for (std::size_t i = 0; i < p; ++i) {
      d[i] = res[i].hd_dual[h];
      s[i] = res[i].hd_single[h];
    }
    hd.rows.push_back({static_cast<double>(sc.hd_values[h]), mean_std(d).mean, mean_std(s).mean});
  }
  r.tables.emplace_back("challenge_avalanche", std::move(hd));

  Table per{{"instance", "sac_max_deviation_dual", "sac_max_deviation_single",
             "uf_worst_deviation_dual", "uf_worst_deviation_single"}, {}};
  for (std::size_t i = 0; i < p; ++i)
    per.rows.push_back({static_cast<double>(i), res[i].dev_dual, res[i].dev_single,
                        mean_abs_deviation_from_half(res[i].wc_dual),
                        mean_abs_deviation_from_half(res[i].wc_single)});
  r.tables.emplace_back("per_instance", std::move(per));
  return r;
}

/// Leakage SNR against dummy count. Each instance answers its own random
/// challenge list; every dummy count reuses the same evaluation substreams.
/// Traces of instance 0 are attached as CSV.
inline Report run_snr_sweep(const ExperimentConfig& cfg, std::size_t workers = 1) {
  cfg.validate();
  const auto pcfg = cfg.resolved_puf();
  const auto& sweep = cfg.counts.dummy_sweep;
  const std::size_t p = cfg.counts.instances;

  std::vector<std::vector<double>> snrs(p, std::vector<double>(sweep.size()));
  std::vector<std::vector<double>> powers(p, std::vector<double>(sweep.size()));
  std::string traces;
  parallel_for(p, workers, [&](std::size_t i) {
    const auto puf = make_puf(pcfg, instance_seed(cfg.master_seed, i));
    Stream cr(derive_seed(puf.instance_seed, StreamTag::challenges, {3}));
    const auto challenges = random_challenges(cr, cfg.counts.challenges);
    std::ostringstream csv;
    for (std::size_t d = 0; d < sweep.size(); ++d) {
      const auto trace = collect_traces(puf, challenges, cfg.environment, sweep[d]);
      snrs[i][d] = snr(trace);
      double sum = 0;
      for (const auto& s : trace.samples) sum += s.power_w;
      powers[i][d] = sum / static_cast<double>(trace.samples.size());
      if (i == 0) {
        std::ostringstream one;
        write_trace_csv(one, trace);
        const auto text = one.str();
        csv << (d == 0 ? text : text.substr(text.find('\n') + 1));
      }
    }
    if (i == 0) traces = csv.str();
  });

  Report r{ExperimentKind::snr, cfg, {}, {}, {}, {}};
  Table t{{"dummy_count", "snr_mean", "snr_std", "power_mean_w"}, {}};
  std::vector<double> x, y;
  for (std::size_t d = 0; d < sweep.size(); ++d) {
    std::vector<double> v(p), w(p);
    for (std::size_t i = 0; i < p; ++i) {
      v[i] = snrs[i][d];
      w[i] = powers[i][d];
    }
    const auto ms = mean_std(v);
    t.rows.push_back({static_cast<double>(sweep[d]), ms.mean, ms.std, mean_std(w).mean});
    x.push_back(static_cast<double>(sweep[d]));
    y.push_back(ms.mean);
  }
  r.scalars.emplace_back("snr_first", y.front());
  r.scalars.emplace_back("snr_last", y.back());
  if (sweep.size() >= 2) r.scalars.emplace_back("spearman_snr_vs_dummy", spearman(x, y));
  r.tables.emplace_back("snr_sweep", std::move(t));
  r.attachments.emplace_back("traces.csv", std::move(traces));
  return r;
}

inline Report run_experiment(const ExperimentConfig& cfg, std::size_t workers = 1) {
  switch (cfg.kind) {
    case ExperimentKind::metrics: return run_metrics_suite(cfg, workers);
    case ExperimentKind::reliability: return run_reliability_sweep(cfg, workers);
    case ExperimentKind::sac: return run_sac_experiment(cfg, workers);
    case ExperimentKind::snr: return run_snr_sweep(cfg, workers);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace nrpuf
