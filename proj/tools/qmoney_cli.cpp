/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

// qmoney command-line front end.
//
//   qmoney threshold --mu 1 --eta 0.77
//   qmoney sweep --mu 0.5 1 1.5 2 --eta 0.6 0.7 0.77 0.9 --out grid.csv
//   qmoney simulate --config run.json --seed 7
//   qmoney verdict --config run.json
//   qmoney horizon --eta-ref 0.77 --lifetime 15 --epsilon-ref 0.0078
//
// Flags override values from --config (or $QMONEY_CONFIG). Exit codes:
// 0 success, 2 solver failure, 3 validation failure.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmoney/run_config.hpp"

namespace {

using namespace qmoney;
using cli::OutputFormat;
using cli::RunConfig;
using cli::RunMode;

constexpr int kExitOk = 0;
constexpr int kExitSolverFailure = 2;
constexpr int kExitValidation = 3;

void write_output(const RunConfig& cfg, const std::string& csv,
                  const nlohmann::json& json) {
  if (cfg.output_path.empty()) return;
  if (cfg.format == OutputFormat::Csv) {
    cli::atomic_write_file(cfg.output_path, csv);
  } else {
    cli::atomic_write_file(cfg.output_path, json.dump(2) + "\n");
  }
  std::cout << "wrote " << cfg.output_path << "\n";
}

int run_threshold(const RunConfig& cfg) {
  const ThresholdResult r =
      compute_threshold(ThresholdQuery(MeanPhotonNumber(cfg.mu), cfg.eta), cfg.solver);
  std::cout << "epsilon_threshold = " << fmt_g12(r.epsilon_threshold) << " ("
            << fmt_g12(100.0 * r.epsilon_threshold) << "%) at mu=" << fmt_g12(r.mu)
            << " eta=" << fmt_g12(r.eta) << " ["
            << sdp::to_string(r.solution.status) << ", gap "
            << fmt_g12(r.solution.gap) << ", " << r.solution.iterations
            << " iterations]\n";
  std::ostringstream csv;
  csv << "mu,eta,epsilon_threshold,raw_objective,gap,status\n"
      << fmt_g12(r.mu) << ',' << fmt_g12(r.eta) << ','
      << fmt_g12(r.epsilon_threshold) << ',' << fmt_g12(r.raw_objective) << ','
      << fmt_g12(r.solution.gap) << ',' << sdp::to_string(r.solution.status)
      << '\n';
  write_output(cfg, csv.str(), threshold_to_json(r));
  return r.solution.status == sdp::SolveStatus::Optimal ? kExitOk
                                                        : kExitSolverFailure;
}

int run_sweep(const RunConfig& cfg) {
  const SweepGrid grid = sweep(cfg.mu_values, cfg.eta_values, cfg.solver);
  std::cout << grid.results.size() << " cells (" << grid.failures.size()
            << " failed)\n";
  for (const std::string& f : grid.failures) std::cout << "  " << f << "\n";
  std::string csv;
  if (cfg.plot == "threshold-vs-mu") {
    csv = emit_plot_data(grid, PlotStyle::ThresholdVsMu);
  } else if (cfg.plot == "secure-region") {
    csv = emit_plot_data(grid, PlotStyle::SecureRegion);
  } else {
    csv = sweep_to_csv(grid);
  }
  write_output(cfg, csv, sweep_to_json(grid));
  if (cfg.output_path.empty()) std::cout << csv;
  return grid.complete() ? kExitOk : kExitSolverFailure;
}

int run_simulate(const RunConfig& cfg) {
  const sim::SecretKey key = sim::keygen(cfg.key_length, cfg.seed);
  const sim::RunReport rep =
      sim::run_protocol(key, cfg.channel, cfg.cycles, cfg.seed);
  if (rep.degenerate) {
    std::cout << "DEGENERATE run: no sifted detection events\n";
  } else {
    std::cout << "epsilon = " << fmt_g12(100.0 * rep.epsilon_basis_avg)
              << "% +- " << fmt_g12(100.0 * rep.epsilon_basis_avg_stderr)
              << "% (basis average; pooled " << fmt_g12(100.0 * rep.epsilon)
              << "%), sifted " << rep.sifted_count << "/" << rep.pulses
              << " pulses\n";
  }
  write_output(cfg, sim::report_to_csv(rep), sim::report_to_json(rep));
  return kExitOk;
}

int run_verdict(const RunConfig& cfg) {
  const double eta_eff = cfg.channel.effective_efficiency();
  const ThresholdResult th = compute_threshold(
      ThresholdQuery(MeanPhotonNumber(cfg.channel.mu), eta_eff), cfg.solver);
  if (th.solution.status != sdp::SolveStatus::Optimal) {
    std::cerr << "threshold solve failed: " << sdp::to_string(th.solution.status)
              << "\n";
    return kExitSolverFailure;
  }
  const sim::SecretKey key = sim::keygen(cfg.key_length, cfg.seed);
  const sim::RunReport rep =
      sim::run_protocol(key, cfg.channel, cfg.cycles, cfg.seed);
  const sim::VerdictReport v = sim::verdict(rep, th);
  std::cout << sim::to_string(v.verdict) << ": epsilon = "
            << fmt_g12(100.0 * v.epsilon) << "% +- "
            << fmt_g12(100.0 * v.epsilon_stderr) << "%, threshold = "
            << fmt_g12(100.0 * v.epsilon_threshold) << "% (margin "
            << fmt_g12(v.margin_sigma) << " sigma) at mu="
            << fmt_g12(cfg.channel.mu) << " eta=" << fmt_g12(eta_eff) << "\n";
  nlohmann::json j = sim::report_to_json(rep);
  j["verdict"] = sim::to_string(v.verdict);
  j["margin_sigma"] = v.margin_sigma;
  j["epsilon_threshold"] = v.epsilon_threshold;
  std::ostringstream csv;
  csv << "verdict,epsilon,epsilon_stderr,epsilon_threshold,margin_sigma\n"
      << sim::to_string(v.verdict) << ',' << fmt_g12(v.epsilon) << ','
      << fmt_g12(v.epsilon_stderr) << ',' << fmt_g12(v.epsilon_threshold) << ','
      << fmt_g12(v.margin_sigma) << '\n';
  write_output(cfg, csv.str(), j);
  return kExitOk;
}

int run_horizon(const RunConfig& cfg) {
  const HorizonResult h = secure_storage_horizon(cfg.horizon, cfg.solver);
  if (!h.any_secure) {
    std::cout << "no secure storage time (insecure already at t=0)\n";
  } else {
    std::cout << "secure storage horizon: " << fmt_g12(h.horizon_us)
              << " us (calibrated background " << fmt_g12(h.background_rate)
              << ")\n";
  }
  std::ostringstream csv;
  csv << "t_us,eta,epsilon,epsilon_threshold,secure\n";
  for (const HorizonPoint& pt : h.trace) {
    csv << fmt_g12(pt.t_us) << ',' << fmt_g12(pt.eta) << ','
        << fmt_g12(pt.epsilon) << ',' << fmt_g12(pt.epsilon_threshold) << ','
        << (pt.secure ? 1 : 0) << '\n';
  }
  nlohmann::json j;
  j["horizon_us"] = h.horizon_us;
  j["any_secure"] = h.any_secure;
  j["background_rate"] = h.background_rate;
  j["trace"] = nlohmann::json::array();
  for (const HorizonPoint& pt : h.trace) {
    j["trace"].push_back({{"t_us", pt.t_us},
                          {"eta", pt.eta},
                          {"epsilon", pt.epsilon},
                          {"epsilon_threshold", pt.epsilon_threshold},
                          {"secure", pt.secure}});
  }
  write_output(cfg, csv.str(), j);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security thresholds and protocol simulation for "
               "memory-assisted unforgeable quantum money"};
  app.require_subcommand(1);
  app.fallthrough();
  app.footer(cli::config_keys_help());

  std::string config_path;
  if (const char* env = std::getenv("QMONEY_CONFIG")) config_path = env;
  app.add_option("--config", config_path,
                 "JSON config file (default: $QMONEY_CONFIG)")
      ->capture_default_str();

  RunConfig defaults;
  std::uint64_t seed = defaults.seed;
  std::string out_path, format = "csv", plot = defaults.plot;
  double mu = defaults.mu, eta = defaults.eta;
  std::vector<double> mu_values, eta_values;
  std::uint64_t cycles = defaults.cycles;
  std::size_t key_length = defaults.key_length;
  double enc_err = defaults.channel.encoding_error;
  double mem_eff = defaults.channel.memory_efficiency;
  double background = defaults.channel.background_click_prob;
  bool storage = defaults.channel.storage_enabled;
  double storage_time = defaults.channel.storage_time_us;
  double lifetime_tau = defaults.channel.lifetime_tau_us;
  double h_eta_ref = defaults.horizon.eta_reference;
  double h_lifetime = defaults.horizon.lifetime_us;
  double h_eps_ref = defaults.horizon.epsilon_reference;
  double h_ref_time = defaults.horizon.reference_time_us;
  double h_enc = defaults.horizon.encoding_error;
  double h_step = defaults.horizon.scan_step_us;
  std::string decay = "gaussian-1e";
  double gap_tol = defaults.solver.gap_tol;
  double feas_tol = defaults.solver.feas_tol;
  int max_iter = defaults.solver.max_iter;

  app.add_option("--seed", seed, "RNG seed (config key: seed)")
      ->capture_default_str();
  app.add_option("--out", out_path, "output file path (config key: output.path)");
  app.add_option("--format", format, "output format: csv|json (output.format)")
      ->capture_default_str();
  app.add_option("--gap-tol", gap_tol, "solver duality-gap tolerance (solver.gap_tol)")
      ->capture_default_str();
  app.add_option("--feas-tol", feas_tol, "solver feasibility tolerance (solver.feas_tol)")
      ->capture_default_str();
  app.add_option("--max-iter", max_iter, "solver iteration cap (solver.max_iter)")
      ->capture_default_str();

  auto* sc_threshold =
      app.add_subcommand("threshold", "error-rate threshold at one (mu, eta)");
  sc_threshold->add_option("--mu", mu, "mean photon number (config key: mu)")
      ->capture_default_str();
  sc_threshold->add_option("--eta", eta, "storage-and-retrieval efficiency (eta)")
      ->capture_default_str();

  auto* sc_sweep = app.add_subcommand("sweep", "threshold sweep over a (mu, eta) grid");
  sc_sweep->add_option("--mu", mu_values, "mu grid values (mu_values)");
  sc_sweep->add_option("--eta", eta_values, "eta grid values (eta_values)");
  sc_sweep->add_option("--plot", plot,
                       "output layout: table|threshold-vs-mu|secure-region "
                       "(output.plot)")
      ->capture_default_str();

  const auto add_channel_flags = [&](CLI::App* sc) {
    sc->add_option("--mu", mu, "mean photon number (channel.mu)")
        ->capture_default_str();
    sc->add_option("--encoding-error", enc_err,
                   "orthogonal flip probability per pulse (channel.encoding_error)")
        ->capture_default_str();
    sc->add_option("--memory-efficiency", mem_eff,
                   "photon survival at the reference time (channel.memory_efficiency)")
        ->capture_default_str();
    sc->add_option("--background", background,
                   "background click probability per detector per window "
                   "(channel.background_click_prob)")
        ->capture_default_str();
    sc->add_flag("--storage,!--no-storage", storage,
                 "enable the memory storage step (channel.storage_enabled)")
        ->capture_default_str();
    sc->add_option("--storage-time", storage_time,
                   "storage time in us (channel.storage_time_us)")
        ->capture_default_str();
    sc->add_option("--lifetime", lifetime_tau,
                   "memory lifetime in us (channel.lifetime_tau_us)")
        ->capture_default_str();
    sc->add_option("--decay", decay,
                   "efficiency decay model: gaussian-1e|gaussian-1e2|"
                   "exponential-1e2 (channel.decay)")
        ->capture_default_str();
    sc->add_option("--cycles", cycles, "protocol repetitions (cycles)")
        ->capture_default_str();
    sc->add_option("--key-length", key_length, "states per key (key_length)")
        ->capture_default_str();
  };
  auto* sc_simulate =
      app.add_subcommand("simulate", "Monte-Carlo run of the full protocol");
  add_channel_flags(sc_simulate);
  auto* sc_verdict = app.add_subcommand(
      "verdict", "simulate and judge against the matching threshold");
  add_channel_flags(sc_verdict);

  auto* sc_horizon =
      app.add_subcommand("horizon", "maximum secure storage time");
  sc_horizon->add_option("--mu", mu, "mean photon number (horizon.mu)")
      ->capture_default_str();
  sc_horizon->add_option("--eta-ref", h_eta_ref,
                         "efficiency at the reference time (horizon.eta_reference)")
      ->capture_default_str();
  sc_horizon->add_option("--lifetime", h_lifetime,
                         "memory lifetime in us (horizon.lifetime_us)")
      ->capture_default_str();
  sc_horizon->add_option("--epsilon-ref", h_eps_ref,
                         "error rate at the reference time (horizon.epsilon_reference)")
      ->capture_default_str();
  sc_horizon->add_option("--reference-time", h_ref_time,
                         "reference time in us (horizon.reference_time_us)")
      ->capture_default_str();
  sc_horizon->add_option("--encoding-error", h_enc,
                         "storage-free error floor (horizon.encoding_error)")
      ->capture_default_str();
  sc_horizon->add_option("--step", h_step,
                         "scan step in us (horizon.scan_step_us)")
      ->capture_default_str();
  sc_horizon->add_option("--decay", decay,
                         "efficiency decay model (horizon.decay)")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = cli::parse_config_file(config_path);

    if (sc_threshold->parsed()) cfg.mode = RunMode::Threshold;
    if (sc_sweep->parsed()) cfg.mode = RunMode::Sweep;
    if (sc_simulate->parsed()) cfg.mode = RunMode::Simulate;
    if (sc_verdict->parsed()) cfg.mode = RunMode::Verdict;
    if (sc_horizon->parsed()) cfg.mode = RunMode::Horizon;

    const auto touched = [&](const std::string& flag) {
      for (CLI::App* sc : {&app, sc_threshold, sc_sweep, sc_simulate,
                           sc_verdict, sc_horizon}) {
        if (const CLI::Option* o = sc->get_option_no_throw(flag)) {
          if (o->count() > 0) return true;
        }
      }
      return false;
    };

    if (touched("--mu")) {
      cfg.mu = mu;
      cfg.channel.mu = mu;
      cfg.horizon.mu = mu;
      if (!mu_values.empty()) cfg.mu_values = mu_values;
    }
    if (touched("--eta")) {
      cfg.eta = eta;
      if (!eta_values.empty()) cfg.eta_values = eta_values;
    }
    if (touched("--seed")) cfg.seed = seed;
    if (touched("--out")) cfg.output_path = out_path;
    if (touched("--format")) {
      if (format == "csv") cfg.format = OutputFormat::Csv;
      else if (format == "json") cfg.format = OutputFormat::Json;
      else throw cli::ConfigError("output.format: expected csv or json, got '" +
                                  format + "'");
    }
    if (touched("--plot")) cfg.plot = plot;
    if (touched("--cycles")) cfg.cycles = cycles;
    if (touched("--key-length")) cfg.key_length = key_length;
    if (touched("--encoding-error")) {
      cfg.channel.encoding_error = enc_err;
      cfg.horizon.encoding_error = h_enc;
    }
    if (touched("--memory-efficiency")) cfg.channel.memory_efficiency = mem_eff;
    if (touched("--background")) cfg.channel.background_click_prob = background;
    if (touched("--storage") || touched("--no-storage")) {
      cfg.channel.storage_enabled = storage;
    }
    if (touched("--storage-time")) cfg.channel.storage_time_us = storage_time;
    if (touched("--lifetime")) {
      cfg.channel.lifetime_tau_us = lifetime_tau;
      cfg.horizon.lifetime_us = h_lifetime;
    }
    if (touched("--decay")) {
      cfg.channel.decay = cli::detail::parse_decay(decay, "channel.");
      cfg.horizon.decay = cfg.channel.decay;
    }
    if (touched("--eta-ref")) cfg.horizon.eta_reference = h_eta_ref;
    if (touched("--epsilon-ref")) cfg.horizon.epsilon_reference = h_eps_ref;
    if (touched("--reference-time")) cfg.horizon.reference_time_us = h_ref_time;
    if (touched("--step")) cfg.horizon.scan_step_us = h_step;
    if (touched("--gap-tol")) cfg.solver.gap_tol = gap_tol;
    if (touched("--feas-tol")) cfg.solver.feas_tol = feas_tol;
    if (touched("--max-iter")) cfg.solver.max_iter = max_iter;

    cfg.validate();

    switch (cfg.mode) {
      case RunMode::Threshold: return run_threshold(cfg);
      case RunMode::Sweep: return run_sweep(cfg);
      case RunMode::Simulate: return run_simulate(cfg);
      case RunMode::Verdict: return run_verdict(cfg);
      case RunMode::Horizon: return run_horizon(cfg);
    }
    return kExitOk;
  } catch (const cli::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSolverFailure;
  }
}
