#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qmoney/protocol_sim.hpp"

using namespace qmoney;
using namespace qmoney::sim;

namespace {

ChannelParams clean_channel(double mu) {
  ChannelParams p;
  p.mu = mu;
  p.encoding_error = 0.0;
  p.memory_efficiency = 1.0;
  p.background_click_prob = 0.0;
  p.storage_enabled = false;
  return p;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
  const auto zeros = Philox4x32::generate_raw({0, 0, 0, 0}, 0, 0);
  CHECK(zeros[0] == 0x6627e8d5u);
  CHECK(zeros[1] == 0xe169c58du);
  CHECK(zeros[2] == 0xbc57ac4cu);
  CHECK(zeros[3] == 0x9b00dbd8u);
  const auto ones = Philox4x32::generate_raw(
      {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, 0xffffffffu,
      0xffffffffu);
  CHECK(ones[0] == 0x408f276du);
  CHECK(ones[1] == 0x41c83b0eu);
  CHECK(ones[2] == 0xa20bc7c6u);
  CHECK(ones[3] == 0x6d5451fdu);
  const auto pi = Philox4x32::generate_raw(
      {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, 0xa4093822u,
      0x299f31d0u);
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("distinct streams are decorrelated and reproducible") {
  RandomStream a(99, 0), b(99, 1), a2(99, 0);
  bool all_equal = true;
  for (int i = 0; i < 64; ++i) {
    const std::uint32_t va = a.next_u32();
    if (va != b.next_u32()) all_equal = false;
    CHECK(va == a2.next_u32());
  }
  CHECK_FALSE(all_equal);
}

TEST_CASE("keygen produces the requested length deterministically") {
  const SecretKey k1 = keygen(28, 7);
  const SecretKey k2 = keygen(28, 7);
  const SecretKey k3 = keygen(28, 8);
  REQUIRE(k1.entries.size() == 28);
  bool same = true, same_cross = true;
  for (std::size_t i = 0; i < 28; ++i) {
    same &= k1.entries[i].basis == k2.entries[i].basis &&
            k1.entries[i].bit == k2.entries[i].bit;
    same_cross &= k1.entries[i].basis == k3.entries[i].basis &&
                  k1.entries[i].bit == k3.entries[i].bit;
  }
  CHECK(same);
  CHECK_FALSE(same_cross);
  CHECK_THROWS_AS(keygen(0, 1), std::invalid_argument);
}

TEST_CASE("keygen uniformity chi-square over the four states") {
  const std::size_t n = 100000;
  const SecretKey key = keygen(n, 123);
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const KeyEntry& e : key.entries) ++counts[state_index(e.basis, e.bit)];
  double chi2 = 0.0;
  const double expect = double(n) / 4.0;
  for (std::size_t c : counts) {
    chi2 += (double(c) - expect) * (double(c) - expect) / expect;
  }
  // 3 degrees of freedom; p > 0.001 means chi2 below 16.27
  CHECK(chi2 < 16.27);
}

TEST_CASE("vacuum-limit pulses never click") {
  ChannelParams p = clean_channel(1e-9);
  RandomStream rng(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const TransactionRecord rec =
        simulate_pulse({Basis::Linear, 0}, p, Basis::Linear, rng);
    CHECK(rec.outcome == Outcome::NoDetection);
    CHECK_FALSE(rec.sifted);
  }
}

TEST_CASE("noiseless matched-basis pulses never err") {
  ChannelParams p = clean_channel(1.0);
  RandomStream rng(2, 0);
  int detected = 0;
  for (int i = 0; i < 100000; ++i) {
    const TransactionRecord rec =
        simulate_pulse({Basis::Circular, 1}, p, Basis::Circular, rng);
    CHECK_FALSE(rec.error);
    if (rec.outcome != Outcome::NoDetection) ++detected;
  }
  CHECK(detected > 0);
}

TEST_CASE("losses alone never create errors") {
  ChannelParams p = clean_channel(1.0);
  p.memory_efficiency = 0.3;
  const SecretKey key = keygen(28, 5);
  const RunReport rep = run_protocol(key, p, 500, 5);
  CHECK(rep.error_count == 0);
  CHECK(rep.sifted_count > 0);
}

TEST_CASE("record invariants: outcome vs clicks and sifting") {
  ChannelParams p = clean_channel(1.0);
  p.background_click_prob = 0.5;  // engineered double clicks
  RandomStream rng(3, 0);
  int doubles = 0;
  for (int i = 0; i < 20000; ++i) {
    const Basis vb = i % 2 == 0 ? Basis::Linear : Basis::Circular;
    const TransactionRecord rec = simulate_pulse({Basis::Linear, 0}, p, vb, rng);
    CHECK((rec.outcome == Outcome::NoDetection) == (!rec.click0 && !rec.click1));
    CHECK(rec.sifted == (vb == Basis::Linear && rec.outcome != Outcome::NoDetection));
    if (rec.click0 && rec.click1) ++doubles;
    if (rec.error) CHECK(rec.sifted);
  }
  CHECK(doubles > 1000);
}

TEST_CASE("double clicks resolve to a uniform random bit") {
  ChannelParams p = clean_channel(1e-9);  // background only
  p.background_click_prob = 1.0;          // every pulse double-clicks
  RandomStream rng(4, 0);
  int ones = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const TransactionRecord rec =
        simulate_pulse({Basis::Linear, 0}, p, Basis::Linear, rng);
    CHECK(rec.click0);
    CHECK(rec.click1);
    if (rec.outcome == Outcome::Bit1) ++ones;
  }
  const double frac = double(ones) / n;
  CHECK(frac > 0.5 - 4.0 * 0.5 / std::sqrt(double(n)));
  CHECK(frac < 0.5 + 4.0 * 0.5 / std::sqrt(double(n)));
}

TEST_CASE("error rate tracks the encoding flip probability") {
  ChannelParams p = clean_channel(1.0);
  p.encoding_error = 0.003;
  const SecretKey key = keygen(28, 17);
  const RunReport rep = run_protocol(key, p, 4000, 17);
  REQUIRE_FALSE(rep.degenerate);
  const double expected = expected_error_rate(p);
  CHECK(expected == doctest::Approx(0.003).epsilon(1e-9));
  CHECK(std::abs(rep.epsilon_basis_avg - expected) <
        3.0 * rep.epsilon_basis_avg_stderr);
}

TEST_CASE("sampler matches the analytic expectation with background and loss") {
  ChannelParams p = clean_channel(1.0);
  p.encoding_error = 0.004;
  p.memory_efficiency = 0.77;
  p.background_click_prob = 0.0035;
  const SecretKey key = keygen(28, 23);
  const RunReport rep = run_protocol(key, p, 6000, 23);
  REQUIRE_FALSE(rep.degenerate);
  CHECK(std::abs(rep.epsilon_basis_avg - expected_error_rate(p)) <
        3.0 * rep.epsilon_basis_avg_stderr);
  // detection probability converges to the honest-loss model
  const double det_expected = expected_detection_prob(p);
  const double det = double(rep.detected_count) / double(rep.pulses);
  const double det_stderr =
      std::sqrt(det_expected * (1.0 - det_expected) / double(rep.pulses));
  CHECK(std::abs(det - det_expected) < 3.0 * det_stderr);
}

TEST_CASE("deterministic replay and seed sensitivity") {
  ChannelParams p = clean_channel(1.2);
  p.encoding_error = 0.005;
  p.background_click_prob = 0.002;
  const SecretKey key = keygen(28, 31);
  const RunReport a = run_protocol(key, p, 500, 31);
  const RunReport b = run_protocol(key, p, 500, 31);
  CHECK(a.error_count == b.error_count);
  CHECK(a.sifted_count == b.sifted_count);
  CHECK(a.epsilon == b.epsilon);
  const RunReport c = run_protocol(key, p, 500, 32);
  CHECK((a.error_count != c.error_count || a.sifted_count != c.sifted_count));
}

TEST_CASE("per-basis symmetry and sifted fraction") {
  ChannelParams p = clean_channel(1.0);
  p.encoding_error = 0.004;
  const SecretKey key = keygen(28, 41);
  const RunReport rep = run_protocol(key, p, 6000, 41);
  REQUIRE_FALSE(rep.degenerate);
  const double n0 = double(rep.sifted_by_basis[0]);
  const double n1 = double(rep.sifted_by_basis[1]);
  const double e0 = rep.per_basis_epsilon[0];
  const double e1 = rep.per_basis_epsilon[1];
  const double se =
      std::sqrt(e0 * (1 - e0) / n0 + e1 * (1 - e1) / n1);
  CHECK(std::abs(e0 - e1) < 4.0 * se);
  // half of detected pulses match the vendor basis on average
  const double sift_frac = double(rep.sifted_count) / double(rep.detected_count);
  const double sf_stderr = 0.5 / std::sqrt(double(rep.detected_count));
  CHECK(std::abs(sift_frac - 0.5) < 4.0 * sf_stderr);
}

TEST_CASE("degenerate runs are flagged") {
  ChannelParams p = clean_channel(1e-9);
  const SecretKey key = keygen(1, 3);
  const RunReport rep = run_protocol(key, p, 1, 3);
  CHECK(rep.degenerate);
  CHECK(rep.sifted_count == 0);
}

TEST_CASE("background calibration hits its target") {
  ChannelParams p = clean_channel(1.0);
  p.encoding_error = 0.00315;
  p.memory_efficiency = 0.77;
  p.storage_enabled = true;
  p.storage_time_us = 1.0;
  const double b = calibrate_background(p, 0.0078);
  CHECK(b > 0.0);
  p.background_click_prob = b;
  CHECK(expected_error_rate(p) == doctest::Approx(0.0078).epsilon(1e-9));
  CHECK_THROWS_AS((void)calibrate_background(p, 0.001), std::invalid_argument);
}

TEST_CASE("storage rescales the efficiency along the decay curve") {
  ChannelParams p = clean_channel(1.0);
  p.memory_efficiency = 0.77;
  p.storage_enabled = true;
  p.lifetime_tau_us = 15.0;
  p.reference_time_us = 1.0;
  p.storage_time_us = 1.0;
  CHECK(p.effective_efficiency() == doctest::Approx(0.77).epsilon(1e-12));
  p.storage_time_us = 6.0;
  CHECK(p.effective_efficiency() ==
        doctest::Approx(0.77 * std::exp(-35.0 / 225.0)).epsilon(1e-12));
  p.storage_enabled = false;
  CHECK(p.effective_efficiency() == 0.77);
}

TEST_CASE("verdict classification and margin") {
  ThresholdResult th;
  th.mu = 1.0;
  th.eta = 0.77;
  th.epsilon_threshold = 0.022;
  RunReport rep;
  rep.params.mu = 1.0;
  rep.sifted_count = 10000;
  rep.epsilon = rep.epsilon_basis_avg = 0.0078;
  rep.epsilon_stderr = rep.epsilon_basis_avg_stderr = 0.0007;
  const VerdictReport v = verdict(rep, th);
  CHECK(v.verdict == Verdict::Secure);
  CHECK(v.margin_sigma == doctest::Approx(20.2857).epsilon(1e-3));

  RunReport bad = rep;
  bad.epsilon_basis_avg = 0.03;
  CHECK(verdict(bad, th).verdict == Verdict::Insecure);

  RunReport degen;
  degen.params.mu = 1.0;
  degen.degenerate = true;
  CHECK(verdict(degen, th).verdict == Verdict::Undefined);

  RunReport wrong_mu = rep;
  wrong_mu.params.mu = 2.0;
  CHECK_THROWS_AS((void)verdict(wrong_mu, th), std::invalid_argument);
}

TEST_CASE("report serialization carries the headline numbers") {
  ChannelParams p = clean_channel(1.0);
  p.encoding_error = 0.004;
  const RunReport rep = run_protocol(keygen(28, 51), p, 200, 51);
  const nlohmann::json j = report_to_json(rep);
  CHECK(j.at("epsilon").get<double>() == rep.epsilon);
  CHECK(j.at("sifted_count").get<std::uint64_t>() == rep.sifted_count);
  const std::string csv = report_to_csv(rep);
  CHECK(csv.find("epsilon") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
