/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_PROTOCOL_SIM_HPP
#define QMONEY_PROTOCOL_SIM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmoney/philox.hpp"
#include "qmoney/states.hpp"
#include "qmoney/threshold.hpp"

namespace qmoney::sim {

enum class Basis { Linear, Circular };
enum class Outcome { Bit0, Bit1, NoDetection };

inline std::string to_string(Basis b) {
  return b == Basis::Linear ? "linear" : "circular";
}

// Money-state index k from (basis, bit): 0=H, 1=sigma+, 2=V, 3=sigma-.
inline int state_index(Basis basis, int bit) {
  return (basis == Basis::Circular ? 1 : 0) + 2 * bit;
}
inline Basis basis_of(int k) { return k % 2 == 0 ? Basis::Linear : Basis::Circular; }
inline int bit_of(int k) { return k / 2; }

// Physical parameters of one bank->memory->vendor channel configuration.
struct ChannelParams {
  double mu = 1.0;
  double encoding_error = 0.005;        // orthogonal flip per pulse
  double memory_efficiency = 0.77;      // per-photon survival at reference time
  double background_click_prob = 0.0;   // per detector per window
  bool storage_enabled = false;
  double storage_time_us = 1.0;
  double lifetime_tau_us = 15.0;
  double reference_time_us = 1.0;
  MemoryDecay decay = MemoryDecay::Gaussian1e;

  void validate() const {
    const auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!(mu > 0.0) || mu > 20.0 || !prob(encoding_error) ||
        !prob(memory_efficiency) || !prob(background_click_prob)) {
      throw std::invalid_argument("ChannelParams: probability out of range");
    }
    if (storage_enabled && (!(storage_time_us >= 0.0) || !(lifetime_tau_us > 0.0) ||
                            !(reference_time_us > 0.0))) {
      throw std::invalid_argument("ChannelParams: bad storage timing");
    }
  }

  // Per-photon survival probability. With storage, the efficiency quoted
  // at reference_time_us is rescaled along the memory decay curve.
  double effective_efficiency() const {
    if (!storage_enabled) return memory_efficiency;
    HorizonParams decay_model;
    decay_model.mu = mu;
    decay_model.eta_reference = memory_efficiency;
    decay_model.lifetime_us = lifetime_tau_us;
    decay_model.reference_time_us = reference_time_us;
    decay_model.decay = decay;
    return decay_model.efficiency_at(storage_time_us);
  }
};

struct KeyEntry {
  Basis basis;
  int bit;
};

struct SecretKey {
  std::vector<KeyEntry> entries;
};

// Reserved Philox stream ids: pulses use their global index, key
// generation uses the top stream.
inline constexpr std::uint64_t kKeygenStream = ~std::uint64_t{0};

inline SecretKey keygen(std::size_t length, std::uint64_t seed) {
  if (length < 1) throw std::invalid_argument("keygen: length must be >= 1");
  RandomStream rng(seed, kKeygenStream);
  SecretKey key;
  key.entries.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const Basis basis = rng.bernoulli(0.5) ? Basis::Circular : Basis::Linear;
    const int bit = rng.bernoulli(0.5) ? 1 : 0;
    key.entries.push_back({basis, bit});
  }
  return key;
}

struct TransactionRecord {
  std::uint64_t pulse_index = 0;
  int sent_k = 0;
  Basis vendor_basis = Basis::Linear;
  bool click0 = false;
  bool click1 = false;
  Outcome outcome = Outcome::NoDetection;
  bool sifted = false;
  bool error = false;
};

// One pulse through encode -> store -> measure -> squash. Draw order is
// fixed: photon count, encoding flip, per-photon survival, per-photon
// detector choice (wrong basis only), two background draws, double-click
// resolution.
inline TransactionRecord simulate_pulse(const KeyEntry& entry,
                                        const ChannelParams& params,
                                        Basis vendor_basis, RandomStream& rng,
                                        std::uint64_t pulse_index = 0) {
  const double eta = params.effective_efficiency();
  TransactionRecord rec;
  rec.pulse_index = pulse_index;
  rec.sent_k = state_index(entry.basis, entry.bit);
  rec.vendor_basis = vendor_basis;

  const int photons = rng.poisson(params.mu);
  const bool flipped = rng.bernoulli(params.encoding_error);
  const int sent_bit = entry.bit ^ (flipped ? 1 : 0);

  int surviving = 0;
  for (int i = 0; i < photons; ++i) {
    if (rng.bernoulli(eta)) ++surviving;
  }

  bool click[2] = {false, false};
  if (vendor_basis == entry.basis) {
    // Matched basis: every photon of the pulse lands on the detector of
    // its (possibly flipped) polarization.
    if (surviving > 0) click[sent_bit] = true;
  } else {
    // Conjugate basis: each photon picks a detector at random.
    for (int i = 0; i < surviving; ++i) {
      click[rng.bernoulli(0.5) ? 1 : 0] = true;
    }
  }
  if (rng.bernoulli(params.background_click_prob)) click[0] = true;
  if (rng.bernoulli(params.background_click_prob)) click[1] = true;

  rec.click0 = click[0];
  rec.click1 = click[1];
  if (!click[0] && !click[1]) {
    rec.outcome = Outcome::NoDetection;
  } else if (click[0] && click[1]) {
    rec.outcome = rng.bernoulli(0.5) ? Outcome::Bit1 : Outcome::Bit0;
  } else {
    rec.outcome = click[1] ? Outcome::Bit1 : Outcome::Bit0;
  }

  rec.sifted = vendor_basis == entry.basis && rec.outcome != Outcome::NoDetection;
  rec.error = rec.sifted && rec.outcome != (entry.bit ? Outcome::Bit1 : Outcome::Bit0);
  return rec;
}

struct RunReport {
  ChannelParams params;
  std::uint64_t cycles = 0;
  std::uint64_t seed = 0;
  std::uint64_t pulses = 0;
  std::uint64_t detected_count = 0;
  std::uint64_t sifted_count = 0;
  std::uint64_t error_count = 0;
  std::uint64_t sifted_by_basis[2] = {0, 0};
  std::uint64_t errors_by_basis[2] = {0, 0};
  bool degenerate = false;  // no sifted detection events at all

  // Pooled estimate: errors over sifted detection events.
  double epsilon = 0.0;
  double epsilon_stderr = 0.0;
  // Equal-weight average of the two per-basis error rates, as reported in
  // the reference experiment; near-identical to the pooled value.
  double per_basis_epsilon[2] = {0.0, 0.0};
  double epsilon_basis_avg = 0.0;
  double epsilon_basis_avg_stderr = 0.0;
};

inline RunReport run_protocol(const SecretKey& key, const ChannelParams& params,
                              std::uint64_t cycles, std::uint64_t seed) {
  params.validate();
  if (cycles < 1) throw std::invalid_argument("run_protocol: cycles must be >= 1");
  if (key.entries.empty()) throw std::invalid_argument("run_protocol: empty key");

  RunReport rep;
  rep.params = params;
  rep.cycles = cycles;
  rep.seed = seed;

  const std::uint64_t len = key.entries.size();
  for (std::uint64_t cycle = 0; cycle < cycles; ++cycle) {
    for (std::uint64_t i = 0; i < len; ++i) {
      const std::uint64_t pulse_index = cycle * len + i;
      RandomStream rng(seed, pulse_index);
      const Basis vendor_basis =
          rng.bernoulli(0.5) ? Basis::Circular : Basis::Linear;
      const TransactionRecord rec =
          simulate_pulse(key.entries[i], params, vendor_basis, rng, pulse_index);
      ++rep.pulses;
      if (rec.outcome != Outcome::NoDetection) ++rep.detected_count;
      if (rec.sifted) {
        ++rep.sifted_count;
        ++rep.sifted_by_basis[static_cast<int>(rec.vendor_basis)];
        if (rec.error) {
          ++rep.error_count;
          ++rep.errors_by_basis[static_cast<int>(rec.vendor_basis)];
        }
      }
    }
  }

  if (rep.sifted_count == 0) {
    rep.degenerate = true;
    return rep;
  }
  rep.epsilon = double(rep.error_count) / double(rep.sifted_count);
  rep.epsilon_stderr =
      std::sqrt(rep.epsilon * (1.0 - rep.epsilon) / double(rep.sifted_count));

  if (rep.sifted_by_basis[0] > 0 && rep.sifted_by_basis[1] > 0) {
    double var_sum = 0.0;
    for (int b = 0; b < 2; ++b) {
      const double n = double(rep.sifted_by_basis[b]);
      const double e = double(rep.errors_by_basis[b]) / n;
      rep.per_basis_epsilon[b] = e;
      var_sum += e * (1.0 - e) / n;
    }
    rep.epsilon_basis_avg =
        0.5 * (rep.per_basis_epsilon[0] + rep.per_basis_epsilon[1]);
    rep.epsilon_basis_avg_stderr = 0.5 * std::sqrt(var_sum);
  } else {
    // One basis never sifted; fall back to the pooled estimate.
    rep.per_basis_epsilon[0] = rep.per_basis_epsilon[1] = rep.epsilon;
    rep.epsilon_basis_avg = rep.epsilon;
    rep.epsilon_basis_avg_stderr = rep.epsilon_stderr;
  }
  return rep;
}

// ---------------------------------------------------------------------
// Analytic expectations (matched-basis pulses; the mismatched half is
// sifted away). Used for calibration and as an independent check on the
// sampler.

inline double expected_detection_prob(const ChannelParams& params) {
  const double q = 1.0 - std::exp(-params.effective_efficiency() * params.mu);
  const double b = params.background_click_prob;
  return 1.0 - (1.0 - q) * (1.0 - b) * (1.0 - b);
}

inline double expected_error_rate(const ChannelParams& params) {
  const double q = 1.0 - std::exp(-params.effective_efficiency() * params.mu);
  const double p = params.encoding_error;
  const double b = params.background_click_prob;
  const double a = 1.0 - (1.0 - q) * (1.0 - b);  // signal-side detector clicks
  const double errors = (1.0 - p) * (b * (1.0 - a) + 0.5 * b * a) +
                        p * (a * (1.0 - b) + 0.5 * a * b);
  return errors / expected_detection_prob(params);
}

// Mean storage-free error rate; with zero background the expected error
// rate equals the encoding flip probability exactly.
inline double calibrate_encoding_error(const std::vector<double>& measured) {
  if (measured.empty()) {
    throw std::invalid_argument("calibrate_encoding_error: no anchors");
  }
  double acc = 0.0;
  for (double v : measured) acc += v;
  return acc / double(measured.size());
}

// Solve expected_error_rate(params with background=b) == target for b by
// bisection. The expected rate is strictly increasing in the background
// level whenever target exceeds the encoding error.
inline double calibrate_background(ChannelParams params, double target_epsilon) {
  if (target_epsilon <= params.encoding_error) {
    throw std::invalid_argument(
        "calibrate_background: target below the encoding-error floor");
  }
  double lo = 0.0, hi = 0.2;
  params.background_click_prob = hi;
  if (expected_error_rate(params) < target_epsilon) {
    throw std::invalid_argument("calibrate_background: target unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    params.background_click_prob = mid;
    (expected_error_rate(params) < target_epsilon ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------
// Verdict against a computed threshold

enum class Verdict { Secure, Insecure, Undefined };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Secure: return "SECURE";
    case Verdict::Insecure: return "INSECURE";
    case Verdict::Undefined: return "UNDEFINED";
  }
  return "UNKNOWN";
}

struct VerdictReport {
  Verdict verdict = Verdict::Undefined;
  double epsilon = 0.0;
  double epsilon_stderr = 0.0;
  double epsilon_threshold = 0.0;
  double margin_sigma = 0.0;  // (threshold - epsilon) in stderr units
};

inline VerdictReport verdict(const RunReport& report,
                             const ThresholdResult& threshold,
                             double k_sigma = 0.0) {
  if (std::abs(report.params.mu - threshold.mu) > 1e-12) {
    throw std::invalid_argument("verdict: report and threshold mu differ");
  }
  VerdictReport v;
  v.epsilon_threshold = threshold.epsilon_threshold;
  if (report.degenerate) return v;
  v.epsilon = report.epsilon_basis_avg;
  v.epsilon_stderr = report.epsilon_basis_avg_stderr;
  v.margin_sigma = v.epsilon_stderr > 0.0
                       ? (v.epsilon_threshold - v.epsilon) / v.epsilon_stderr
                       : std::numeric_limits<double>::infinity();
  v.verdict = (v.epsilon + k_sigma * v.epsilon_stderr < v.epsilon_threshold)
                  ? Verdict::Secure
                  : Verdict::Insecure;
  return v;
}

// ---------------------------------------------------------------------
// Serialization

inline nlohmann::json report_to_json(const RunReport& r) {
  return {{"mu", r.params.mu},
          {"encoding_error", r.params.encoding_error},
          {"memory_efficiency", r.params.memory_efficiency},
          {"background_click_prob", r.params.background_click_prob},
          {"storage_enabled", r.params.storage_enabled},
          {"storage_time_us", r.params.storage_time_us},
          {"cycles", r.cycles},
          {"seed", r.seed},
          {"pulses", r.pulses},
          {"detected_count", r.detected_count},
          {"sifted_count", r.sifted_count},
          {"error_count", r.error_count},
          {"degenerate", r.degenerate},
          {"epsilon", r.epsilon},
          {"epsilon_stderr", r.epsilon_stderr},
          {"per_basis_epsilon", {r.per_basis_epsilon[0], r.per_basis_epsilon[1]}},
          {"epsilon_basis_avg", r.epsilon_basis_avg},
          {"epsilon_basis_avg_stderr", r.epsilon_basis_avg_stderr}};
}

inline std::string report_to_csv(const RunReport& r) {
  std::ostringstream os;
  os << "mu,cycles,seed,pulses,detected,sifted,errors,epsilon,epsilon_stderr,"
        "epsilon_basis_avg,epsilon_basis_avg_stderr,degenerate\n";
  os << fmt_g12(r.params.mu) << ',' << r.cycles << ',' << r.seed << ','
     << r.pulses << ',' << r.detected_count << ',' << r.sifted_count << ','
     << r.error_count << ',' << fmt_g12(r.epsilon) << ','
     << fmt_g12(r.epsilon_stderr) << ',' << fmt_g12(r.epsilon_basis_avg) << ','
     << fmt_g12(r.epsilon_basis_avg_stderr) << ',' << (r.degenerate ? 1 : 0)
     << '\n';
  return os.str();
}

}  // namespace qmoney::sim

#endif  // QMONEY_PROTOCOL_SIM_HPP
