// nrpuf command-line front end.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 runtime error.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nrpuf/config.hpp"
#include "nrpuf/crp.hpp"
#include "nrpuf/errors.hpp"
#include "nrpuf/experiments.hpp"
#include "nrpuf/persistence.hpp"
#include "nrpuf/puf.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

nrpuf::Challenge parse_challenge(std::string s) {
  if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) s = s.substr(2);
  if (s.empty() || s.size() > 16) throw nrpuf::ConfigError("challenge must be 1..16 hex digits: '" + s + "'");
  std::uint64_t v = 0;
  for (char ch : s) {
    int d;
    if (ch >= '0' && ch <= '9') d = ch - '0';
    else if (ch >= 'a' && ch <= 'f') d = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F') d = ch - 'A' + 10;
    else throw nrpuf::ConfigError("challenge is not hexadecimal: '" + s + "'");
    v = (v << 4) | static_cast<std::uint64_t>(d);
  }
  return {v};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nrpuf: Monte Carlo simulator of a nonlinear resistive ReRAM PUF"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path, out_dir, format = "json";
  std::optional<std::uint64_t> seed;
  std::size_t workers = 1;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--workers", workers, "Worker threads")->check(CLI::Range(std::size_t{1}, std::size_t{1024}));

  // crp-count
  auto* crp = app.add_subcommand("crp-count", "Size of the challenge-response space");
  std::uint64_t n_cols = 128, m_rows = 128, cs = 5, l = 1;
  std::string formula = "eq5", log2_mode = "real";
  crp->add_option("--n", n_cols, "Columns N");
  crp->add_option("--m", m_rows, "Rows M");
  crp->add_option("--cs", cs, "Columns selected");
  crp->add_option("--l", l, "Hidden-challenge width (eq5)");
  crp->add_option("--formula", formula, "eq5 or table1")->check(CLI::IsMember({"eq5", "table1"}));
  crp->add_option("--log2", log2_mode, "table1 log2 factor: real or floor")
      ->check(CLI::IsMember({"real", "floor"}));

  // save-instance
  auto* save = app.add_subcommand("save-instance", "Manufacture one instance and write it to a file");
  std::string save_out;
  std::size_t index = 0;
  save->add_option("--config", config_path, "Experiment config (JSON)")->required();
  save->add_option("--out", save_out, "Instance file")->required();
  save->add_option("--index", index, "Instance index under the master seed");
  save->add_option("--seed", seed, "Override master_seed");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate challenges on a saved instance");
  std::string instance_path, mode = "noise-free";
  std::vector<std::string> challenges;
  std::uint64_t trial = 0;
  std::size_t dummy_count = 0;
  eval->add_option("--instance", instance_path, "Instance file")->required();
  eval->add_option("--challenge", challenges, "64-bit challenges in hex")->required();
  eval->add_option("--mode", mode, "noise-free or noisy")->check(CLI::IsMember({"noise-free", "noisy"}));
  eval->add_option("--trial", trial, "Trial index for noisy evaluation");
  eval->add_option("--dummy-count", dummy_count, "Dummy cells read per evaluation (noisy mode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      auto cfg = nrpuf::load_config(config_path);
      if (seed) cfg.master_seed = *seed;
      const auto report = nrpuf::run_experiment(cfg, workers);
      nrpuf::write_report(report, out_dir, nrpuf::parse_format(format));
    } else if (*crp) {
      const auto count = nrpuf::crp_count(n_cols, m_rows, cs, l, nrpuf::parse_crp_formula(formula),
                                          nrpuf::parse_log2_mode(log2_mode));
      std::cout << count << '\n';
    } else if (*save) {
      auto cfg = nrpuf::load_config(config_path);
      if (seed) cfg.master_seed = *seed;
      const auto puf = nrpuf::make_puf(cfg.resolved_puf(), nrpuf::instance_seed(cfg.master_seed, index));
      nrpuf::save_instance(puf, save_out);
    } else if (*eval) {
      std::vector<nrpuf::Challenge> parsed;
      for (const auto& s : challenges) parsed.push_back(parse_challenge(s));
      const auto puf = nrpuf::load_instance(instance_path);
      const nrpuf::Environment env;
      for (std::size_t i = 0; i < parsed.size(); ++i) {
        int bit;
        if (mode == "noisy") {
          auto rng = nrpuf::evaluation_stream(puf, parsed[i], trial);
          bit = nrpuf::evaluate_bit(puf, parsed[i], env, dummy_count, rng).bit;
        } else {
          bit = nrpuf::evaluate_noise_free(puf, parsed[i], env);
        }
        char hex[24];
        std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(parsed[i].bits));
        std::cout << hex << ' ' << bit << '\n';
      }
    }
  } catch (const nrpuf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
