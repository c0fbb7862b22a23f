/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_STATES_HPP
#define QMONEY_STATES_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qmoney/complex_matrix.hpp"

namespace qmoney {

// Mean photon number per weak-coherent pulse.
class MeanPhotonNumber {
 public:
  explicit MeanPhotonNumber(double mu) : mu_(mu) {
    if (!(mu > 0.0) || mu > 20.0) {
      throw std::invalid_argument("MeanPhotonNumber: mu must be in (0, 20], got " +
                                  std::to_string(mu));
    }
  }
  double value() const { return mu_; }

 private:
  double mu_;
};

// Photon-number statistics of a phase-randomized pulse, split into the
// three sectors that matter for security: vacuum, single photon, and
// two-or-more photons.
struct PoissonSplit {
  double p0;      // exp(-mu)
  double p1;      // mu*exp(-mu)
  double p2plus;  // 1-(1+mu)*exp(-mu)
};

inline PoissonSplit poisson_split(MeanPhotonNumber mu) {
  const double m = mu.value();
  const double e = std::exp(-m);
  return {e, m * e, 1.0 - (1.0 + m) * e};
}

// 7-dim state basis ordering: {vacuum, H, V, m0, m1, m2, m3}.
inline constexpr Index kStateDim = 7;
inline constexpr Index kVacuumIndex = 0;
inline constexpr Index kHIndex = 1;
inline constexpr Index kVIndex = 2;
inline constexpr Index kMultiphotonBase = 3;
inline constexpr int kNumMoneyStates = 4;

inline const std::array<std::string, 7>& state_basis_labels() {
  static const std::array<std::string, 7> labels = {"v",  "H",  "V", "m0",
                                                    "m1", "m2", "m3"};
  return labels;
}

// The qubit carried by money state k, in the {|H>,|V>} span, together with
// its orthogonal complement. Phase convention (the single place it is
// fixed): |sigma+> = (|H> + i|V>)/sqrt(2), |sigma-> = (|H> - i|V>)/sqrt(2).
struct SquashedQubit {
  int k;
  Eigen::Vector2cd beta;
  Eigen::Vector2cd beta_perp;
};

inline SquashedQubit squashed_qubit(int k) {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i(0.0, 1.0);
  Eigen::Vector2cd h, v, sp, sm;
  h << 1.0, 0.0;
  v << 0.0, 1.0;
  sp << r, r * i;
  sm << r, -r * i;
  switch (k) {
    case 0:
      return {0, h, v};
    case 1:
      return {1, sp, sm};
    case 2:
      return {2, v, h};
    case 3:
      return {3, sm, sp};
    default:
      throw std::invalid_argument("squashed_qubit: k must be 0..3, got " +
                                  std::to_string(k));
  }
}

// Phase-randomized money state rho_k on the 7-dim basis: vacuum weight on
// |v>, single-photon weight on the squashed qubit |beta_k>, multiphoton
// weight on the perfectly distinguishable flag |m_k>. Block-diagonal across
// the vacuum / qubit / multiphoton sectors by construction.
struct MoneyState {
  int k;
  HermitianOperator rho;
};

inline MoneyState money_state(int k, MeanPhotonNumber mu) {
  if (k < 0 || k >= kNumMoneyStates) {
    throw std::invalid_argument("money_state: k must be 0..3, got " +
                                std::to_string(k));
  }
  const PoissonSplit p = poisson_split(mu);
  const SquashedQubit q = squashed_qubit(k);
  ComplexMatrix rho = ComplexMatrix::Zero(kStateDim, kStateDim);
  rho(kVacuumIndex, kVacuumIndex) = p.p0;
  rho.block<2, 2>(kHIndex, kHIndex) = p.p1 * (q.beta * q.beta.adjoint());
  rho(kMultiphotonBase + k, kMultiphotonBase + k) = p.p2plus;
  return {k, HermitianOperator(std::move(rho))};
}

// Entrywise complex conjugate; for Hermitian rho this is the transpose, so
// it stays PSD with the same trace.
inline HermitianOperator conjugate_state(const MoneyState& s) {
  ComplexMatrix c = s.rho.matrix().conjugate();
  return HermitianOperator(std::move(c), s.rho.hermiticity_tol());
}

}  // namespace qmoney

#endif  // QMONEY_STATES_HPP
