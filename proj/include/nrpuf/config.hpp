#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nrpuf/device.hpp"
#include "nrpuf/errors.hpp"
#include "nrpuf/puf.hpp"

namespace nrpuf {

using Json = nlohmann::ordered_json;

enum class ExperimentKind { metrics, reliability, sac, snr };

inline std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::metrics: return "metrics";
    case ExperimentKind::reliability: return "reliability";
    case ExperimentKind::sac: return "sac";
    case ExperimentKind::snr: return "snr";
  }
  return "metrics";
}

inline ExperimentKind parse_kind(const std::string& s) {
  if (s == "metrics") return ExperimentKind::metrics;
  if (s == "reliability") return ExperimentKind::reliability;
  if (s == "sac") return ExperimentKind::sac;
  if (s == "snr") return ExperimentKind::snr;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

/// Comparator input-pair geometry. When present, offset_sigma is derived
/// from it by Pelgrom scaling.
struct PelgromGeometry {
  double sigma_ref = 5e-9;
  double w = 1e-6;
  double l = 1e-6;
  double w_ref = 1e-6;
  double l_ref = 1e-6;

  double offset_sigma() const { return pelgrom_offset(sigma_ref, w, l, w_ref, l_ref); }
  friend bool operator==(const PelgromGeometry&, const PelgromGeometry&) = default;
};

struct Counts {
  std::size_t instances = 100;
  std::size_t challenges = 1000;
  std::size_t trials = 1;
  std::size_t response_bits = 64;
  std::size_t dummy_count = 0;
  std::vector<std::size_t> dummy_sweep{0, 1, 2, 4, 8, 16, 32};
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct WorstCaseSettings {
  std::size_t sets = 100;
  unsigned max_hd = 5;
  friend bool operator==(const WorstCaseSettings&, const WorstCaseSettings&) = default;
};

struct ReliabilitySettings {
  std::vector<std::size_t> cs_values{1, 2, 3, 4, 5};
  std::vector<double> margins{10e-9, 20e-9, 30e-9, 40e-9, 50e-9,
                              60e-9, 70e-9, 80e-9, 90e-9, 100e-9};
  friend bool operator==(const ReliabilitySettings&, const ReliabilitySettings&) = default;
};

struct SacSettings {
  std::size_t samples = 50;       // neighbours per (j,k) cell when not enumerable
  std::size_t references = 200;   // reference selections per instance
  std::size_t max_k = 2;
  std::size_t base_challenges = 500;
  std::vector<unsigned> hd_values{1, 2, 3, 4, 5};
  friend bool operator==(const SacSettings&, const SacSettings&) = default;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::metrics;
  std::uint64_t master_seed = 1;
  PufConfig puf{};
  std::optional<PelgromGeometry> pelgrom;
  Environment environment{};
  Counts counts{};
  WorstCaseSettings worst_case{};
  ReliabilitySettings reliability{};
  SacSettings sac{};
  std::size_t histogram_bins = 20;

  /// PufConfig with the comparator offset resolved from the geometry.
  PufConfig resolved_puf() const {
    PufConfig p = puf;
    if (pelgrom) p.offset_sigma = pelgrom->offset_sigma();
    return p;
  }

  void validate() const {
    resolved_puf().validate();
    environment.validate();
    auto positive = [](std::size_t v, const char* name) {
      if (v < 1) throw ConfigError(std::string("counts: ") + name + " must be >= 1");
    };
    positive(counts.instances, "instances");
    positive(counts.challenges, "challenges");
    positive(counts.trials, "trials");
    positive(counts.response_bits, "response_bits");
    positive(histogram_bins, "histogram_bins");
    const std::size_t dummy_cells = puf.dummy_rows * puf.dummy_cols;
    if (counts.dummy_count > dummy_cells) throw ConfigError("counts: dummy_count exceeds dummy array");
    if (counts.dummy_sweep.empty()) throw ConfigError("counts: dummy_sweep must be non-empty");
    for (std::size_t i = 0; i < counts.dummy_sweep.size(); ++i) {
      if (counts.dummy_sweep[i] > dummy_cells) throw ConfigError("counts: dummy_sweep entry exceeds dummy array");
      if (i > 0 && counts.dummy_sweep[i] <= counts.dummy_sweep[i - 1])
        throw ConfigError("counts: dummy_sweep must be strictly increasing");
    }
    if (worst_case.sets < 1) throw ConfigError("worst_case: sets must be >= 1");
    if (worst_case.max_hd < 1 || worst_case.max_hd > kChallengeBits)
      throw ConfigError("worst_case: max_hd must be in [1, 64]");
    if (reliability.cs_values.empty() || reliability.margins.empty())
      throw ConfigError("reliability: cs_values and margins must be non-empty");
    for (auto cs : reliability.cs_values)
      if (cs < 1 || cs > kMaxColumnsSelected || cs > puf.cols)
        throw ConfigError("reliability: cs values must be in [1, min(5, cols)]");
    for (auto m : reliability.margins)
      if (!(m >= 0)) throw ConfigError("reliability: margins must be >= 0");
    if (sac.samples < 1 || sac.references < 1 || sac.base_challenges < 1) throw ConfigError("sac: counts must be >= 1");
    if (sac.max_k > 2 || sac.max_k > puf.rows - 2) throw ConfigError("sac: max_k out of range");
    if (puf.cs > puf.cols - puf.cs) throw ConfigError("sac: array too narrow for full column transitions");
    for (auto hd : sac.hd_values)
      if (hd > kChallengeBits) throw ConfigError("sac: hd values must be in [0, 64]");
    if (kind == ExperimentKind::metrics && counts.instances < 2)
      throw ConfigError("metrics: at least 2 instances are required");
    if (kind == ExperimentKind::reliability && counts.trials < 2)
      throw ConfigError("reliability: at least 2 trials are required");
  }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// ---------------------------------------------------------------------------
// JSON mapping. Unknown keys are rejected so that typos do not silently fall
// back to defaults.
// ---------------------------------------------------------------------------

namespace detail {

class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~ObjectReader() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
  }
  ObjectReader(const ObjectReader&) = delete;
  ObjectReader& operator=(const ObjectReader&) = delete;

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) throw ConfigError(at(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  template <class U>
  void count(const std::string& key, U& out) {
    if (auto* v = find(key)) out = static_cast<U>(as_count(*v, at(key)));
  }
  void seed(const std::string& key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(at(key) + ": expected an unsigned integer");
      out = v->get<std::uint64_t>();
    }
  }
  template <class U>
  void count_list(const std::string& key, std::vector<U>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) throw ConfigError(at(key) + ": expected an array");
      out.clear();
      for (const auto& e : *v) out.push_back(static_cast<U>(as_count(e, at(key))));
    }
  }
  void number_list(const std::string& key, std::vector<double>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) throw ConfigError(at(key) + ": expected an array");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(at(key) + ": expected numbers");
        out.push_back(e.get<double>());
      }
    }
  }
  std::string at(const std::string& key) const { return path_ + "." + key; }

 private:
  static std::uint64_t as_count(const Json& v, const std::string& where) {
    if (!v.is_number_unsigned()) throw ConfigError(where + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace detail

inline Json device_to_json(const DeviceParams& d) {
  return Json{{"mu_ln_r", d.mu_ln_r},
              {"sigma_ln_r", d.sigma_ln_r},
              {"stuck_on_prob", d.stuck_on_prob},
              {"lrs_range_ohm", Json::array({d.lrs_low, d.lrs_high})},
              {"nonlin_alpha", d.nonlin_alpha},
              {"activation_energy_ev", d.activation_energy},
              {"ref_voltage_v", d.ref_voltage},
              {"ref_temperature_k", d.ref_temperature}};
}

inline DeviceParams device_from_json(const Json& j, const std::string& path = "device") {
  DeviceParams d;
  detail::ObjectReader r(j, path);
  r.number("mu_ln_r", d.mu_ln_r);
  r.number("sigma_ln_r", d.sigma_ln_r);
  r.number("stuck_on_prob", d.stuck_on_prob);
  if (auto* v = r.find("lrs_range_ohm")) {
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw ConfigError(r.at("lrs_range_ohm") + ": expected [low, high]");
    d.lrs_low = (*v)[0].get<double>();
    d.lrs_high = (*v)[1].get<double>();
  }
  r.number("nonlin_alpha", d.nonlin_alpha);
  r.number("activation_energy_ev", d.activation_energy);
  r.number("ref_voltage_v", d.ref_voltage);
  r.number("ref_temperature_k", d.ref_temperature);
  return d;
}

inline Json environment_to_json(const Environment& e) {
  return Json{{"read_voltage_v", e.read_voltage},
              {"temperature_k", e.temperature},
              {"supply_sigma_frac", e.supply_sigma_frac},
              {"temp_jitter_k", e.temp_jitter},
              {"column_supply_share", e.column_supply_share}};
}

inline Environment environment_from_json(const Json& j, const std::string& path = "environment") {
  Environment e;
  detail::ObjectReader r(j, path);
  r.number("read_voltage_v", e.read_voltage);
  r.number("temperature_k", e.temperature);
  r.number("supply_sigma_frac", e.supply_sigma_frac);
  r.number("temp_jitter_k", e.temp_jitter);
  r.number("column_supply_share", e.column_supply_share);
  return e;
}

inline Json power_to_json(const PowerModel& p) {
  return Json{{"baseline_w", p.baseline_w}, {"noise_w", p.noise_w}, {"latch_bit_w", p.latch_bit_w}};
}

inline PowerModel power_from_json(const Json& j, const std::string& path = "power") {
  PowerModel p;
  detail::ObjectReader r(j, path);
  r.number("baseline_w", p.baseline_w);
  r.number("noise_w", p.noise_w);
  r.number("latch_bit_w", p.latch_bit_w);
  return p;
}

inline Json to_json(const ExperimentConfig& c) {
  Json comparator{{"offset_sigma_a", c.puf.offset_sigma}, {"sense_margin_a", c.puf.sense_margin}};
  if (c.pelgrom) {
    comparator["pelgrom"] = Json{{"sigma_ref_a", c.pelgrom->sigma_ref},
                                 {"w_m", c.pelgrom->w},
                                 {"l_m", c.pelgrom->l},
                                 {"w_ref_m", c.pelgrom->w_ref},
                                 {"l_ref_m", c.pelgrom->l_ref}};
  }
  return Json{
      {"kind", to_string(c.kind)},
      {"master_seed", c.master_seed},
      {"array",
       {{"rows", c.puf.rows},
        {"cols", c.puf.cols},
        {"dummy_rows", c.puf.dummy_rows},
        {"dummy_cols", c.puf.dummy_cols}}},
      {"cs", c.puf.cs},
      {"device", device_to_json(c.puf.device)},
      {"comparator", comparator},
      {"power", power_to_json(c.puf.power)},
      {"environment", environment_to_json(c.environment)},
      {"counts",
       {{"instances", c.counts.instances},
        {"challenges", c.counts.challenges},
        {"trials", c.counts.trials},
        {"response_bits", c.counts.response_bits},
        {"dummy_count", c.counts.dummy_count},
        {"dummy_sweep", c.counts.dummy_sweep}}},
      {"worst_case", {{"sets", c.worst_case.sets}, {"max_hd", c.worst_case.max_hd}}},
      {"reliability",
       {{"cs_values", c.reliability.cs_values}, {"margins_a", c.reliability.margins}}},
      {"sac",
       {{"samples", c.sac.samples},
        {"references", c.sac.references},
        {"max_k", c.sac.max_k},
        {"base_challenges", c.sac.base_challenges},
        {"hd_values", c.sac.hd_values}}},
      {"histogram_bins", c.histogram_bins},
  };
}

/// Parses and validates a configuration document. Absent keys take their
/// defaults.
inline ExperimentConfig config_from_json(const Json& j) {
  ExperimentConfig c;
  {
    detail::ObjectReader r(j, "config");
    if (auto* v = r.find("kind")) {
      if (!v->is_string()) throw ConfigError("config.kind: expected a string");
      c.kind = parse_kind(v->get<std::string>());
    }
    r.seed("master_seed", c.master_seed);
    if (auto* v = r.find("array")) {
      detail::ObjectReader a(*v, "array");
      a.count("rows", c.puf.rows);
      a.count("cols", c.puf.cols);
      a.count("dummy_rows", c.puf.dummy_rows);
      a.count("dummy_cols", c.puf.dummy_cols);
    }
    r.count("cs", c.puf.cs);
    if (auto* v = r.find("device")) c.puf.device = device_from_json(*v);
    if (auto* v = r.find("comparator")) {
      detail::ObjectReader a(*v, "comparator");
      a.number("offset_sigma_a", c.puf.offset_sigma);
      a.number("sense_margin_a", c.puf.sense_margin);
      if (auto* g = a.find("pelgrom")) {
        PelgromGeometry geo;
        detail::ObjectReader pr(*g, "comparator.pelgrom");
        pr.number("sigma_ref_a", geo.sigma_ref);
        pr.number("w_m", geo.w);
        pr.number("l_m", geo.l);
        pr.number("w_ref_m", geo.w_ref);
        pr.number("l_ref_m", geo.l_ref);
        c.pelgrom = geo;
      }
    }
    if (auto* v = r.find("power")) c.puf.power = power_from_json(*v);
    if (auto* v = r.find("environment")) c.environment = environment_from_json(*v);
    if (auto* v = r.find("counts")) {
      detail::ObjectReader a(*v, "counts");
      a.count("instances", c.counts.instances);
      a.count("challenges", c.counts.challenges);
      a.count("trials", c.counts.trials);
      a.count("response_bits", c.counts.response_bits);
      a.count("dummy_count", c.counts.dummy_count);
      a.count_list("dummy_sweep", c.counts.dummy_sweep);
    }
    if (auto* v = r.find("worst_case")) {
      detail::ObjectReader a(*v, "worst_case");
      a.count("sets", c.worst_case.sets);
      a.count("max_hd", c.worst_case.max_hd);
    }
    if (auto* v = r.find("reliability")) {
      detail::ObjectReader a(*v, "reliability");
      a.count_list("cs_values", c.reliability.cs_values);
      a.number_list("margins_a", c.reliability.margins);
    }
    if (auto* v = r.find("sac")) {
      detail::ObjectReader a(*v, "sac");
      a.count("samples", c.sac.samples);
      a.count("references", c.sac.references);
      a.count("max_k", c.sac.max_k);
      a.count("base_challenges", c.sac.base_challenges);
      a.count_list("hd_values", c.sac.hd_values);
    }
    r.count("histogram_bins", c.histogram_bins);
  }
  if (c.pelgrom) c.puf.offset_sigma = c.pelgrom->offset_sigma();
  c.validate();
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json(j);
}

inline std::string serialize_config(const ExperimentConfig& c) { return to_json(c).dump(2); }

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace nrpuf
