/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_PHILOX_HPP
#define QMONEY_PHILOX_HPP

#include <array>
#include <cstdint>

namespace qmoney {

// Philox-4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Stream layout used by the simulator: the 64-bit key is the run seed and
// the counter is (stream, block) with a 64-bit stream id (one stream per
// pulse) and a 64-bit block index within the stream. Distinct pulses
// therefore draw from disjoint, reproducible random streams regardless of
// evaluation order.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  static Block generate(std::uint64_t key, std::uint64_t stream,
                        std::uint64_t block) {
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    Block x = {static_cast<std::uint32_t>(block),
               static_cast<std::uint32_t>(block >> 32),
               static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)};
    for (int round = 0; round < 10; ++round) {
      x = single_round(x, k0, k1);
      k0 += 0x9E3779B9u;  // golden-ratio Weyl increments
      k1 += 0xBB67AE85u;
    }
    return x;
  }

  // Raw interface matching the reference test vectors.
  static Block generate_raw(const Block& counter, std::uint32_t k0,
                            std::uint32_t k1) {
    Block x = counter;
    for (int round = 0; round < 10; ++round) {
      x = single_round(x, k0, k1);
      k0 += 0x9E3779B9u;
      k1 += 0xBB67AE85u;
    }
    return x;
  }

 private:
  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
  }

  static Block single_round(const Block& x, std::uint32_t k0, std::uint32_t k1) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(0xD2511F53u, x[0], hi0, lo0);
    mulhilo(0xCD9E8D57u, x[2], hi1, lo1);
    return {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
  }
};

// Per-stream random draws on top of Philox, buffering one block at a time.
class RandomStream {
 public:
  RandomStream(std::uint64_t key, std::uint64_t stream)
      : key_(key), stream_(stream) {}

  std::uint32_t next_u32() {
    if (pos_ == 4) {
      buffer_ = Philox4x32::generate(key_, stream_, block_++);
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    const std::uint64_t hi = next_u32() >> 6;   // 26 bits
    const std::uint64_t lo = next_u32() >> 5;   // 27 bits
    return static_cast<double>((hi << 27) | lo) * 0x1.0p-53;
  }

  bool bernoulli(double prob) { return next_double() < prob; }

  // Inversion by sequential search; exact for the mean photon numbers used
  // here (mu <= 20).
  int poisson(double mean) {
    const double u = next_double();
    double p = std::exp(-mean);
    double cdf = p;
    int k = 0;
    while (u >= cdf && k < 4096) {
      ++k;
      p *= mean / k;
      cdf += p;
    }
    return k;
  }

  std::uint32_t uniform_int(std::uint32_t n) {
    // Rejection-free modulo is fine for the tiny n used here (2 or 4).
    return next_u32() % n;
  }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Block buffer_{};
  int pos_ = 4;
};

}  // namespace qmoney

#endif  // QMONEY_PHILOX_HPP
