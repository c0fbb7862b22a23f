/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_RUN_CONFIG_HPP
#define QMONEY_RUN_CONFIG_HPP

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmoney/protocol_sim.hpp"
#include "qmoney/threshold.hpp"

namespace qmoney::cli {

enum class RunMode { Threshold, Sweep, Simulate, Verdict, Horizon };
enum class OutputFormat { Csv, Json };

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
  RunMode mode = RunMode::Threshold;
  // threshold / verdict point
  double mu = 1.0;
  double eta = 0.77;
  // sweep grids
  std::vector<double> mu_values;
  std::vector<double> eta_values;
  // simulation
  sim::ChannelParams channel;
  std::uint64_t cycles = 4000;
  std::size_t key_length = 28;
  std::uint64_t seed = 1;
  // horizon
  HorizonParams horizon;
  // output
  std::string output_path;
  OutputFormat format = OutputFormat::Csv;
  std::string plot = "table";  // table | threshold-vs-mu | secure-region
  // solver
  sdp::SolveOptions solver = default_threshold_solve_options();

  void validate() const;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& obj,
                                const std::set<std::string>& allowed,
                                const std::string& path) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("unknown config key: " + path + it.key());
    }
  }
}

inline double get_number(const nlohmann::json& obj, const std::string& key,
                         const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) {
    throw ConfigError(path + key + ": expected a number");
  }
  return obj.at(key).get<double>();
}

inline MemoryDecay parse_decay(const std::string& s, const std::string& path) {
  if (s == "gaussian-1e") return MemoryDecay::Gaussian1e;
  if (s == "gaussian-1e2") return MemoryDecay::Gaussian1e2;
  if (s == "exponential-1e2") return MemoryDecay::Exponential1e2;
  throw ConfigError(path + "decay: expected gaussian-1e, gaussian-1e2 or "
                    "exponential-1e2, got '" + s + "'");
}

inline std::string decay_name(MemoryDecay d) {
  switch (d) {
    case MemoryDecay::Gaussian1e: return "gaussian-1e";
    case MemoryDecay::Gaussian1e2: return "gaussian-1e2";
    case MemoryDecay::Exponential1e2: return "exponential-1e2";
  }
  return "gaussian-1e";
}

}  // namespace detail

inline void RunConfig::validate() const {
  const auto check_eta = [](double v, const std::string& name) {
    if (!(v > 0.0) || v > 1.0) {
      throw ConfigError(name + ": must be in (0, 1], got " + fmt_g12(v));
    }
  };
  const auto check_mu = [](double v, const std::string& name) {
    if (!(v > 0.0) || v > 20.0) {
      throw ConfigError(name + ": must be in (0, 20], got " + fmt_g12(v));
    }
  };
  switch (mode) {
    case RunMode::Threshold:
      check_mu(mu, "mu");
      check_eta(eta, "eta");
      break;
    case RunMode::Sweep:
      if (mu_values.empty()) throw ConfigError("mu_values: must be non-empty");
      if (eta_values.empty()) throw ConfigError("eta_values: must be non-empty");
      for (double v : mu_values) check_mu(v, "mu_values");
      for (double v : eta_values) check_eta(v, "eta_values");
      if (plot != "table" && plot != "threshold-vs-mu" && plot != "secure-region") {
        throw ConfigError("plot: expected table, threshold-vs-mu or secure-region");
      }
      break;
    case RunMode::Simulate:
    case RunMode::Verdict:
      try {
        channel.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("channel: ") + e.what());
      }
      if (cycles < 1) throw ConfigError("cycles: must be >= 1");
      if (key_length < 1) throw ConfigError("key_length: must be >= 1");
      break;
    case RunMode::Horizon:
      try {
        horizon.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("horizon: ") + e.what());
      }
      break;
  }
  if (solver.max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");
  if (!(solver.gap_tol > 0.0)) throw ConfigError("solver.gap_tol: must be > 0");
  if (!(solver.feas_tol > 0.0)) throw ConfigError("solver.feas_tol: must be > 0");
}

// Parse a config JSON object (already loaded). Unknown keys are rejected
// with their path; missing keys keep the defaults above.
inline RunConfig parse_config_json(const nlohmann::json& j) {
  using detail::get_number;
  using detail::reject_unknown_keys;

  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  reject_unknown_keys(j,
                      {"mode", "mu", "eta", "mu_values", "eta_values", "channel",
                       "cycles", "key_length", "seed", "horizon", "output",
                       "solver"},
                      "");

  RunConfig cfg;
  if (j.contains("mode")) {
    const std::string m = j.at("mode").get<std::string>();
    if (m == "threshold") cfg.mode = RunMode::Threshold;
    else if (m == "sweep") cfg.mode = RunMode::Sweep;
    else if (m == "simulate") cfg.mode = RunMode::Simulate;
    else if (m == "verdict") cfg.mode = RunMode::Verdict;
    else if (m == "horizon") cfg.mode = RunMode::Horizon;
    else throw ConfigError("mode: expected threshold, sweep, simulate, verdict "
                           "or horizon, got '" + m + "'");
  }
  cfg.mu = get_number(j, "mu", "", cfg.mu);
  cfg.eta = get_number(j, "eta", "", cfg.eta);
  if (j.contains("mu_values")) {
    cfg.mu_values = j.at("mu_values").get<std::vector<double>>();
  }
  if (j.contains("eta_values")) {
    cfg.eta_values = j.at("eta_values").get<std::vector<double>>();
  }
  if (j.contains("cycles")) cfg.cycles = j.at("cycles").get<std::uint64_t>();
  if (j.contains("key_length")) cfg.key_length = j.at("key_length").get<std::size_t>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();

  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    reject_unknown_keys(c,
                        {"mu", "encoding_error", "memory_efficiency",
                         "background_click_prob", "storage_enabled",
                         "storage_time_us", "lifetime_tau_us",
                         "reference_time_us", "decay"},
                        "channel.");
    cfg.channel.mu = get_number(c, "mu", "channel.", cfg.channel.mu);
    cfg.channel.encoding_error =
        get_number(c, "encoding_error", "channel.", cfg.channel.encoding_error);
    cfg.channel.memory_efficiency = get_number(c, "memory_efficiency", "channel.",
                                               cfg.channel.memory_efficiency);
    cfg.channel.background_click_prob =
        get_number(c, "background_click_prob", "channel.",
                   cfg.channel.background_click_prob);
    if (c.contains("storage_enabled")) {
      cfg.channel.storage_enabled = c.at("storage_enabled").get<bool>();
    }
    cfg.channel.storage_time_us =
        get_number(c, "storage_time_us", "channel.", cfg.channel.storage_time_us);
    cfg.channel.lifetime_tau_us =
        get_number(c, "lifetime_tau_us", "channel.", cfg.channel.lifetime_tau_us);
    cfg.channel.reference_time_us = get_number(c, "reference_time_us", "channel.",
                                               cfg.channel.reference_time_us);
    if (c.contains("decay")) {
      cfg.channel.decay =
          detail::parse_decay(c.at("decay").get<std::string>(), "channel.");
    }
  }

  if (j.contains("horizon")) {
    const auto& h = j.at("horizon");
    reject_unknown_keys(h,
                        {"mu", "eta_reference", "lifetime_us",
                         "epsilon_reference", "reference_time_us",
                         "encoding_error", "scan_step_us", "max_scan_time_us",
                         "decay"},
                        "horizon.");
    cfg.horizon.mu = get_number(h, "mu", "horizon.", cfg.horizon.mu);
    cfg.horizon.eta_reference =
        get_number(h, "eta_reference", "horizon.", cfg.horizon.eta_reference);
    cfg.horizon.lifetime_us =
        get_number(h, "lifetime_us", "horizon.", cfg.horizon.lifetime_us);
    cfg.horizon.epsilon_reference = get_number(h, "epsilon_reference", "horizon.",
                                               cfg.horizon.epsilon_reference);
    cfg.horizon.reference_time_us = get_number(h, "reference_time_us", "horizon.",
                                               cfg.horizon.reference_time_us);
    cfg.horizon.encoding_error =
        get_number(h, "encoding_error", "horizon.", cfg.horizon.encoding_error);
    cfg.horizon.scan_step_us =
        get_number(h, "scan_step_us", "horizon.", cfg.horizon.scan_step_us);
    cfg.horizon.max_scan_time_us = get_number(h, "max_scan_time_us", "horizon.",
                                              cfg.horizon.max_scan_time_us);
    if (h.contains("decay")) {
      cfg.horizon.decay =
          detail::parse_decay(h.at("decay").get<std::string>(), "horizon.");
    }
  }

  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown_keys(o, {"path", "format", "plot"}, "output.");
    if (o.contains("path")) cfg.output_path = o.at("path").get<std::string>();
    if (o.contains("format")) {
      const std::string f = o.at("format").get<std::string>();
      if (f == "csv") cfg.format = OutputFormat::Csv;
      else if (f == "json") cfg.format = OutputFormat::Json;
      else throw ConfigError("output.format: expected csv or json, got '" + f + "'");
    }
    if (o.contains("plot")) cfg.plot = o.at("plot").get<std::string>();
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    reject_unknown_keys(s, {"gap_tol", "feas_tol", "max_iter"}, "solver.");
    cfg.solver.gap_tol = get_number(s, "gap_tol", "solver.", cfg.solver.gap_tol);
    cfg.solver.feas_tol = get_number(s, "feas_tol", "solver.", cfg.solver.feas_tol);
    if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
  }
  return cfg;
}

// Canonical documentation of every config-file key with its default.
// Drives the CLI help footer and is cross-checked against the shipped
// schema file by the test suite.
struct ConfigKeyDoc {
  std::string key;
  std::string default_value;
  std::string description;
};

inline std::vector<ConfigKeyDoc> config_key_docs() {
  const RunConfig d;
  return {
      {"mode", "threshold", "threshold | sweep | simulate | verdict | horizon"},
      {"mu", fmt_g12(d.mu), "mean photon number for threshold mode"},
      {"eta", fmt_g12(d.eta), "storage-and-retrieval efficiency for threshold mode"},
      {"mu_values", "[]", "mu grid for sweep mode"},
      {"eta_values", "[]", "eta grid for sweep mode"},
      {"cycles", std::to_string(d.cycles), "protocol repetitions per run"},
      {"key_length", std::to_string(d.key_length), "states in the secret key"},
      {"seed", std::to_string(d.seed), "RNG seed"},
      {"channel.mu", fmt_g12(d.channel.mu), "mean photon number per pulse"},
      {"channel.encoding_error", fmt_g12(d.channel.encoding_error),
       "orthogonal flip probability per pulse"},
      {"channel.memory_efficiency", fmt_g12(d.channel.memory_efficiency),
       "photon survival at the reference time"},
      {"channel.background_click_prob", fmt_g12(d.channel.background_click_prob),
       "background click probability per detector per window"},
      {"channel.storage_enabled",
       d.channel.storage_enabled ? "true" : "false",
       "include the memory storage step"},
      {"channel.storage_time_us", fmt_g12(d.channel.storage_time_us),
       "storage time in microseconds"},
      {"channel.lifetime_tau_us", fmt_g12(d.channel.lifetime_tau_us),
       "memory lifetime in microseconds"},
      {"channel.reference_time_us", fmt_g12(d.channel.reference_time_us),
       "time at which memory_efficiency was measured"},
      {"channel.decay", detail::decay_name(d.channel.decay),
       "efficiency decay model: gaussian-1e | gaussian-1e2 | exponential-1e2"},
      {"horizon.mu", fmt_g12(d.horizon.mu), "mean photon number"},
      {"horizon.eta_reference", fmt_g12(d.horizon.eta_reference),
       "efficiency at the reference time"},
      {"horizon.lifetime_us", fmt_g12(d.horizon.lifetime_us),
       "memory lifetime in microseconds"},
      {"horizon.epsilon_reference", fmt_g12(d.horizon.epsilon_reference),
       "error rate at the reference time"},
      {"horizon.reference_time_us", fmt_g12(d.horizon.reference_time_us),
       "reference time in microseconds"},
      {"horizon.encoding_error", fmt_g12(d.horizon.encoding_error),
       "storage-free error floor"},
      {"horizon.scan_step_us", fmt_g12(d.horizon.scan_step_us),
       "storage-time scan step"},
      {"horizon.max_scan_time_us", fmt_g12(d.horizon.max_scan_time_us),
       "scan cutoff; 0 scans until the efficiency decays away"},
      {"horizon.decay", detail::decay_name(d.horizon.decay),
       "efficiency decay model"},
      {"output.path", "(stdout)", "output file path"},
      {"output.format", "csv", "csv | json"},
      {"output.plot", d.plot, "table | threshold-vs-mu | secure-region"},
      {"solver.gap_tol", fmt_g12(d.solver.gap_tol),
       "relative duality-gap tolerance"},
      {"solver.feas_tol", fmt_g12(d.solver.feas_tol),
       "feasibility residual tolerance"},
      {"solver.max_iter", std::to_string(d.solver.max_iter),
       "interior-point iteration cap"},
  };
}

inline std::string config_keys_help() {
  std::ostringstream os;
  os << "Config file keys (JSON; flags override file values):\n";
  for (const ConfigKeyDoc& doc : config_key_docs()) {
    os << "  " << doc.key << " [default " << doc.default_value << "]: "
       << doc.description << "\n";
  }
  return os.str();
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config_json(j);
}

// Write-to-temp-then-rename; readers never observe a partial file.
inline void atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out << content;
    if (!out.good()) throw std::runtime_error("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw std::runtime_error("rename failed: " + path);
  }
}

}  // namespace qmoney::cli

#endif  // QMONEY_RUN_CONFIG_HPP
