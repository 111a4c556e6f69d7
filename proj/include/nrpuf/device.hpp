#pragma once

#include <cmath>
#include <random>
#include <string>

#include "nrpuf/errors.hpp"
#include "nrpuf/random.hpp"

namespace nrpuf {

/// Boltzmann constant in eV/K.
inline constexpr double kBoltzmannEv = 8.617333262e-5;

/// Voltage step over which the HRS current is multiplied by nonlin_alpha.
inline constexpr double kNonlinearityStepV = 0.1;

/// Population parameters of the ReRAM devices. All quantities are SI
/// (ohms, volts, kelvin) except activation_energy (eV).
///
/// Defaults put the median HRS at 280 kOhm with ln-sigma 0.55, so about 96%
/// of sampled devices fall in [100 kOhm, 1 MOhm]. Stuck-at-ON cells sit an
/// order of magnitude below the HRS median.
struct DeviceParams {
  double mu_ln_r = 12.542544882151386;  // ln(280e3)
  double sigma_ln_r = 0.55;
  double stuck_on_prob = 0.1;
  double lrs_low = 5e3;
  double lrs_high = 25e3;
  double nonlin_alpha = 2.0;
  double activation_energy = 0.1;
  double ref_voltage = 0.1;
  double ref_temperature = 300.0;

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("device params: " + msg); };
    if (!std::isfinite(mu_ln_r)) fail("mu_ln_r must be finite");
    if (!(sigma_ln_r > 0) || !std::isfinite(sigma_ln_r)) fail("sigma_ln_r must be > 0");
    if (!(stuck_on_prob >= 0 && stuck_on_prob <= 1)) fail("stuck_on_prob must be in [0,1]");
    if (!(lrs_low > 0 && lrs_low < lrs_high) || !std::isfinite(lrs_high))
      fail("lrs range must satisfy 0 < low < high");
    if (!(nonlin_alpha >= 1) || !std::isfinite(nonlin_alpha)) fail("nonlin_alpha must be >= 1");
    if (!(activation_energy >= 0) || !std::isfinite(activation_energy))
      fail("activation_energy must be >= 0");
    if (!(ref_voltage > 0)) fail("ref_voltage must be > 0");
    if (!(ref_temperature > 0)) fail("ref_temperature must be > 0");
  }

  friend bool operator==(const DeviceParams&, const DeviceParams&) = default;
};

/// Operating condition. supply_sigma_frac is the 1-sigma fractional READ
/// supply variation (10% 3-sigma -> 0.1/3). column_supply_share is the part
/// of that variance that is local to each driven column line; the rest is
/// shared by the whole read.
struct Environment {
  double read_voltage = 0.1;
  double temperature = 300.0;
  double supply_sigma_frac = 0.1 / 3.0;
  double temp_jitter = 10.0;
  double column_supply_share = 0.10;

  void validate() const {
    auto fail = [](const std::string& msg) { throw ConfigError("environment: " + msg); };
    if (!(read_voltage > 0 && read_voltage <= 0.5)) fail("read_voltage must be in (0, 0.5] V");
    if (!(temperature >= 275 && temperature <= 450)) fail("temperature must be in [275, 450] K");
    if (!(supply_sigma_frac >= 0) || !std::isfinite(supply_sigma_frac))
      fail("supply_sigma_frac must be >= 0");
    if (!(temp_jitter >= 0) || !std::isfinite(temp_jitter)) fail("temp_jitter must be >= 0");
    if (!(column_supply_share >= 0 && column_supply_share <= 1))
      fail("column_supply_share must be in [0,1]");
  }

  bool noise_free() const noexcept { return supply_sigma_frac == 0 && temp_jitter == 0; }

  /// Same nominal point with all temporal variation removed.
  Environment quiet() const noexcept {
    Environment e = *this;
    e.supply_sigma_frac = 0;
    e.temp_jitter = 0;
    return e;
  }

  friend bool operator==(const Environment&, const Environment&) = default;
};

enum class CellState : unsigned char { hrs, stuck_on };

struct ReRAMCell {
  CellState state = CellState::hrs;
  double base_resistance = 1e6;  // ohms at (ref_voltage, ref_temperature)

  friend bool operator==(const ReRAMCell&, const ReRAMCell&) = default;
};

inline double normal(Stream& rng, double mean, double sd) {
  if (sd == 0) return mean;
  std::normal_distribution<double> dist(mean, sd);
  return dist(rng);
}

inline ReRAMCell sample_cell(const DeviceParams& params, Stream& rng) {
  if (params.stuck_on_prob > 0 && rng.uniform01() < params.stuck_on_prob) {
    const double r = params.lrs_low + (params.lrs_high - params.lrs_low) * rng.uniform01();
    return {CellState::stuck_on, r};
  }
  return {CellState::hrs, std::exp(normal(rng, params.mu_ln_r, params.sigma_ln_r))};
}

/// Voltage- and temperature-dependent multiplier of the ohmic current
/// V / R at a realised operating point.
inline double transport_factor(const DeviceParams& params, double voltage,
                               double temperature) noexcept {
  const double nonlin =
      std::pow(params.nonlin_alpha, (voltage - params.ref_voltage) / kNonlinearityStepV);
  const double thermal = std::exp(-(params.activation_energy / kBoltzmannEv) *
                                  (1.0 / temperature - 1.0 / params.ref_temperature));
  return nonlin * thermal;
}

/// Current through one cell at an already realised voltage and temperature.
inline double cell_current_at(const ReRAMCell& cell, const DeviceParams& params, double voltage,
                              double temperature) noexcept {
  return voltage / cell.base_resistance * transport_factor(params, voltage, temperature);
}

/// Current through one cell with the environment's temporal variation drawn
/// from rng: a multiplicative supply error and a uniform temperature offset.
/// With both jitters at zero no randomness is consumed.
inline double cell_current(const ReRAMCell& cell, const DeviceParams& params,
                           const Environment& env, Stream& rng) {
  double v = env.read_voltage;
  double t = env.temperature;
  if (env.supply_sigma_frac > 0) v *= 1.0 + normal(rng, 0.0, env.supply_sigma_frac);
  if (env.temp_jitter > 0) t += env.temp_jitter * (2.0 * rng.uniform01() - 1.0);
  return cell_current_at(cell, params, v, t);
}

/// Mean and standard deviation of the HRS cell current at the reference
/// point, from the lognormal moments of 1/R.
inline double hrs_current_mean(const DeviceParams& p) noexcept {
  return p.ref_voltage * std::exp(-p.mu_ln_r + 0.5 * p.sigma_ln_r * p.sigma_ln_r);
}

inline double hrs_current_sigma(const DeviceParams& p) noexcept {
  const double s2 = p.sigma_ln_r * p.sigma_ln_r;
  return hrs_current_mean(p) * std::sqrt(std::expm1(s2));
}

/// Returns params with sigma_ln_r chosen so that the HRS current standard
/// deviation at the reference point equals target_sigma (amperes). The
/// median resistance is kept. Solved by bisection; the moment is monotone in
/// sigma_ln_r.
inline DeviceParams with_hrs_current_sigma(DeviceParams params, double target_sigma) {
  if (!(target_sigma > 0)) throw ConfigError("target current sigma must be > 0");
  double lo = 1e-6;
  double hi = 4.0;
  params.sigma_ln_r = hi;
  if (hrs_current_sigma(params) < target_sigma)
    throw ConfigError("target current sigma not reachable with this median resistance");
  for (int i = 0; i < 200; ++i) {
    params.sigma_ln_r = 0.5 * (lo + hi);
    (hrs_current_sigma(params) < target_sigma ? lo : hi) = params.sigma_ln_r;
  }
  params.sigma_ln_r = 0.5 * (lo + hi);
  return params;
}

}  // namespace nrpuf
