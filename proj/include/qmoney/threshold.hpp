/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_THRESHOLD_HPP
#define QMONEY_THRESHOLD_HPP

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qmoney/operators.hpp"
#include "qmoney/sdp_certificate.hpp"
#include "qmoney/sdp_solver.hpp"
#include "qmoney/text_format.hpp"

namespace qmoney {

struct ThresholdQuery {
  MeanPhotonNumber mu;
  double eta;  // combined storage-and-retrieval efficiency, in (0, 1]

  ThresholdQuery(MeanPhotonNumber mu_, double eta_) : mu(mu_), eta(eta_) {
    if (!(eta > 0.0) || eta > 1.0) {
      throw std::invalid_argument("ThresholdQuery: eta must be in (0, 1]");
    }
  }
};

struct SolutionSummary {
  sdp::SolveStatus status = sdp::SolveStatus::Numerical;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double condition_estimate = 0.0;
};

// Error-rate threshold for one (mu, eta) point. Errors measured below
// epsilon_threshold are secure; at or above it the optimal cloning attack
// reproduces them.
struct ThresholdResult {
  double mu = 0.0;
  double eta = 0.0;
  double epsilon_threshold = 0.0;
  double raw_objective = 0.0;   // optimal value of the cloning program
  double normalization = 0.0;   // 1 - exp(-eta*mu)
  SolutionSummary solution;
};

// The single-state optimal-cloning program: minimize the first copy's
// error probability Tr(E0 J) over Choi matrices J subject to trace
// preservation, the first copy erring at least as much as the second, and
// both copies' no-detection probabilities capped by the honest loss.
inline sdp::SdpProblem build_cloning_problem(const ThresholdQuery& q) {
  const OperatorSet ops = build_operator_set(q.mu);
  const double loss = honest_loss_bound(q.mu, q.eta);
  sdp::SdpProblem p{ChoiVariableSpec::total_dim, sdp::Sense::Min, ops.e0, {}, {}};
  for (auto& [row, target] : tp_constraint_rows()) {
    p.equalities.push_back({row, target});
  }
  p.inequalities.push_back(
      {HermitianOperator(ops.e1.matrix() - ops.e0.matrix()), 0.0});
  p.inequalities.push_back({ops.l0, loss});
  p.inequalities.push_back({ops.l1, loss});
  return p;
}

inline sdp::SolveOptions default_threshold_solve_options() {
  sdp::SolveOptions opts;
  // Trace of any feasible Choi matrix is pinned to the input dimension.
  opts.initial_trace = static_cast<double>(ChoiVariableSpec::input_dim);
  return opts;
}

// Full diagnostic bundle; compute_threshold below is the plain interface.
struct ThresholdComputation {
  sdp::SdpProblem problem;
  sdp::SdpSolution solution;
  ThresholdResult result;
};

inline ThresholdComputation compute_threshold_full(
    const ThresholdQuery& q,
    const sdp::SolveOptions& opts = default_threshold_solve_options()) {
  ThresholdComputation out{build_cloning_problem(q), {}, {}};
  out.solution = sdp::solve(out.problem, opts);

  ThresholdResult& r = out.result;
  r.mu = q.mu.value();
  r.eta = q.eta;
  r.normalization = 1.0 - std::exp(-q.eta * q.mu.value());
  r.solution = {out.solution.status,       out.solution.primal_value,
                out.solution.dual_value,   out.solution.gap,
                out.solution.iterations,   out.solution.condition_estimate};

  double raw = out.solution.primal_value;
  if (out.solution.status == sdp::SolveStatus::Optimal) {
    if (raw < 0.0 && raw >= -1e-6) {
      raw = 0.0;  // objective is a probability; absorb solver noise at zero
    } else if (raw < -1e-6) {
      r.solution.status = sdp::SolveStatus::Numerical;
    }
  }
  r.raw_objective = raw;
  r.epsilon_threshold = raw / r.normalization;
  return out;
}

inline ThresholdResult compute_threshold(
    const ThresholdQuery& q,
    const sdp::SolveOptions& opts = default_threshold_solve_options()) {
  return compute_threshold_full(q, opts).result;
}

// ---------------------------------------------------------------------
// (mu, eta) sweeps

struct SweepGrid {
  std::vector<double> mu_values;   // sorted ascending
  std::vector<double> eta_values;  // sorted ascending
  // Ordered by (eta, mu): results[e * mu_values.size() + m].
  std::vector<ThresholdResult> results;
  std::vector<std::string> failures;  // one line per failed cell

  bool complete() const { return failures.empty(); }
  const ThresholdResult& at(std::size_t mu_idx, std::size_t eta_idx) const {
    return results.at(eta_idx * mu_values.size() + mu_idx);
  }
};

inline SweepGrid sweep(std::vector<double> mu_values,
                       std::vector<double> eta_values,
                       const sdp::SolveOptions& opts = default_threshold_solve_options()) {
  if (mu_values.empty() || eta_values.empty()) {
    throw std::invalid_argument("sweep: mu and eta lists must be non-empty");
  }
  std::sort(mu_values.begin(), mu_values.end());
  std::sort(eta_values.begin(), eta_values.end());
  SweepGrid grid{std::move(mu_values), std::move(eta_values), {}, {}};
  grid.results.reserve(grid.mu_values.size() * grid.eta_values.size());
  for (double eta : grid.eta_values) {
    for (double mu : grid.mu_values) {
      ThresholdQuery q(MeanPhotonNumber(mu), eta);
      ThresholdResult r = compute_threshold(q, opts);
      if (r.solution.status != sdp::SolveStatus::Optimal) {
        std::ostringstream os;
        os << "cell mu=" << mu << " eta=" << eta << ": "
           << sdp::to_string(r.solution.status);
        grid.failures.push_back(os.str());
      }
      grid.results.push_back(std::move(r));
    }
  }
  return grid;
}

inline std::string sweep_to_csv(const SweepGrid& grid) {
  std::ostringstream os;
  os << "mu,eta,epsilon_threshold,raw_objective,gap,status\n";
  for (const ThresholdResult& r : grid.results) {
    os << fmt_g12(r.mu) << ',' << fmt_g12(r.eta) << ','
       << fmt_g12(r.epsilon_threshold) << ',' << fmt_g12(r.raw_objective) << ','
       << fmt_g12(r.solution.gap) << ',' << sdp::to_string(r.solution.status)
       << '\n';
  }
  return os.str();
}

inline nlohmann::json threshold_to_json(const ThresholdResult& r) {
  return {{"mu", r.mu},
          {"eta", r.eta},
          {"epsilon_threshold", r.epsilon_threshold},
          {"raw_objective", r.raw_objective},
          {"normalization", r.normalization},
          {"status", sdp::to_string(r.solution.status)},
          {"gap", r.solution.gap},
          {"iterations", r.solution.iterations}};
}

inline nlohmann::json sweep_to_json(const SweepGrid& grid) {
  nlohmann::json j;
  j["mu_values"] = grid.mu_values;
  j["eta_values"] = grid.eta_values;
  j["results"] = nlohmann::json::array();
  for (const ThresholdResult& r : grid.results) {
    j["results"].push_back(threshold_to_json(r));
  }
  j["failures"] = grid.failures;
  return j;
}

enum class PlotStyle { ThresholdVsMu, SecureRegion };

// Plot-ready CSV. ThresholdVsMu: one threshold column per eta, rows over
// mu (one curve per efficiency). SecureRegion: (eta, threshold) pairs at
// a single mu delineating the secure-operation boundary.
inline std::string emit_plot_data(const SweepGrid& grid, PlotStyle style) {
  if (!grid.complete()) {
    throw std::invalid_argument("emit_plot_data: sweep has failed cells");
  }
  std::ostringstream os;
  if (style == PlotStyle::ThresholdVsMu) {
    os << "mu";
    for (double eta : grid.eta_values) os << ",eps_th_eta=" << fmt_g12(eta);
    os << '\n';
    for (std::size_t mi = 0; mi < grid.mu_values.size(); ++mi) {
      os << fmt_g12(grid.mu_values[mi]);
      for (std::size_t ei = 0; ei < grid.eta_values.size(); ++ei) {
        os << ',' << fmt_g12(grid.at(mi, ei).epsilon_threshold);
      }
      os << '\n';
    }
  } else {
    if (grid.mu_values.size() != 1) {
      throw std::invalid_argument(
          "emit_plot_data: SecureRegion requires a single-mu sweep");
    }
    os << "eta,epsilon_threshold\n";
    for (std::size_t ei = 0; ei < grid.eta_values.size(); ++ei) {
      os << fmt_g12(grid.eta_values[ei]) << ','
         << fmt_g12(grid.at(0, ei).epsilon_threshold) << '\n';
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------
// Secure storage horizon

// Retrieval-efficiency decay during storage. The quoted lifetime L marks
// where efficiency reaches 1/e of its peak for Gaussian1e (the default,
// which reproduces the reference realization's storage horizon), 1/e^2 for
// Gaussian1e2, and 1/e^2 for Exponential1e2.
enum class MemoryDecay { Gaussian1e, Gaussian1e2, Exponential1e2 };

struct HorizonParams {
  double mu = 1.0;
  double eta_reference = 0.77;      // efficiency measured at reference_time
  double lifetime_us = 15.0;        // memory lifetime
  double epsilon_reference = 0.0078;  // error rate measured at reference_time
  double reference_time_us = 1.0;
  double encoding_error = 0.00315;  // storage-free error floor
  double scan_step_us = 0.1;
  double max_scan_time_us = 0.0;    // 0: scan until eta decays to 0.05
  MemoryDecay decay = MemoryDecay::Gaussian1e;

  void validate() const {
    if (!(mu > 0.0) || !(eta_reference > 0.0) || eta_reference > 1.0 ||
        !(lifetime_us > 0.0) || !(reference_time_us > 0.0) ||
        !(scan_step_us > 0.0) || epsilon_reference < 0.0 ||
        epsilon_reference >= 0.5 || encoding_error < 0.0) {
      throw std::invalid_argument("HorizonParams: out-of-range parameter");
    }
  }

  double efficiency_at(double t_us) const {
    const double l2 = lifetime_us * lifetime_us;
    double log_ratio = 0.0;
    switch (decay) {
      case MemoryDecay::Gaussian1e:
        log_ratio = -(t_us * t_us - reference_time_us * reference_time_us) / l2;
        break;
      case MemoryDecay::Gaussian1e2:
        log_ratio =
            -2.0 * (t_us * t_us - reference_time_us * reference_time_us) / l2;
        break;
      case MemoryDecay::Exponential1e2:
        log_ratio = -2.0 * (t_us - reference_time_us) / lifetime_us;
        break;
    }
    return std::min(1.0, eta_reference * std::exp(log_ratio));
  }

  // Constant-background signal-to-noise model: signal clicks scale with
  // the retrieval efficiency, background clicks do not, and half of the
  // background clicks land on the wrong detector.
  double signal_rate() const { return 1.0 - std::exp(-mu); }

  double background_rate() const {
    const double sig = signal_rate() * eta_reference;
    const double b =
        sig * (epsilon_reference - encoding_error) / (0.5 - epsilon_reference);
    return std::max(0.0, b);
  }

  double epsilon_at(double t_us) const {
    const double sig = signal_rate() * efficiency_at(t_us);
    const double b = background_rate();
    return (0.5 * b + encoding_error * sig) / (sig + b);
  }
};

struct HorizonPoint {
  double t_us;
  double eta;
  double epsilon;
  double epsilon_threshold;
  bool secure;
};

struct HorizonResult {
  double horizon_us = 0.0;
  bool any_secure = false;
  double background_rate = 0.0;
  std::vector<HorizonPoint> trace;
};

// Largest storage time (scanned in scan_step_us increments) at which the
// modelled error rate stays strictly below the threshold recomputed at the
// decayed efficiency. Thresholds are cached per efficiency value.
inline HorizonResult secure_storage_horizon(
    const HorizonParams& params,
    const sdp::SolveOptions& opts = default_threshold_solve_options()) {
  params.validate();
  HorizonResult out;
  out.background_rate = params.background_rate();

  std::map<double, double> threshold_cache;
  const auto threshold_at = [&](double eta) {
    auto it = threshold_cache.find(eta);
    if (it != threshold_cache.end()) return it->second;
    ThresholdQuery q(MeanPhotonNumber(params.mu), eta);
    const ThresholdResult r = compute_threshold(q, opts);
    if (r.solution.status != sdp::SolveStatus::Optimal) {
      throw std::runtime_error("secure_storage_horizon: threshold solve " +
                               sdp::to_string(r.solution.status) + " at eta=" +
                               std::to_string(eta));
    }
    threshold_cache.emplace(eta, r.epsilon_threshold);
    return r.epsilon_threshold;
  };

  const double t_cap = params.max_scan_time_us > 0.0
                           ? params.max_scan_time_us
                           : std::numeric_limits<double>::infinity();
  double last_secure = 0.0;
  for (int step = 0;; ++step) {
    const double t = step * params.scan_step_us;
    if (t > t_cap) break;
    const double eta = params.efficiency_at(t);
    if (eta < 0.05) break;
    const double eps = params.epsilon_at(t);
    const double eps_th = threshold_at(eta);
    const bool secure = eps < eps_th;
    out.trace.push_back({t, eta, eps, eps_th, secure});
    if (!secure) break;
    out.any_secure = true;
    last_secure = t;
  }
  out.horizon_us = out.any_secure ? last_secure : 0.0;
  return out;
}

}  // namespace qmoney

#endif  // QMONEY_THRESHOLD_HPP
