/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_OPERATORS_HPP
#define QMONEY_OPERATORS_HPP

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmoney/complex_matrix.hpp"
#include "qmoney/spaces.hpp"
#include "qmoney/states.hpp"

namespace qmoney {

// Verifier outcome space per copy: {|0>, |1>, |no-detection>}. Double
// clicks are assigned a random bit upstream, so three outcomes suffice.
struct VerifierOutcomeSpace {
  static constexpr Index dim = 3;
  static constexpr Index bit0 = 0;
  static constexpr Index bit1 = 1;
  static constexpr Index no_detection = 2;
};

// Layout of the Choi variable J: output copies (3 x 3) tensor the 7-dim
// input space, leftmost factor slowest. Trace preservation pins the
// partial trace over both copies to the identity on the input space.
struct ChoiVariableSpec {
  static constexpr Index copy_dim = VerifierOutcomeSpace::dim;
  static constexpr Index input_dim = kStateDim;
  static constexpr Index total_dim = copy_dim * copy_dim * input_dim;  // 63

  static std::vector<SpaceLabel> spaces() {
    return {copy1_space(), copy2_space(), initial_space()};
  }
};

enum class CopySlot { First, Second };

namespace detail {

// Embed a qubit-space projector |psi><psi| into the 3-dim outcome space,
// zero on the no-detection row/column.
inline ComplexMatrix embed_qubit_projector(const Eigen::Vector2cd& psi) {
  ComplexMatrix p = ComplexMatrix::Zero(3, 3);
  p.block<2, 2>(0, 0) = psi * psi.adjoint();
  return p;
}

inline ComplexMatrix no_detection_projector() {
  ComplexMatrix p = ComplexMatrix::Zero(3, 3);
  p(VerifierOutcomeSpace::no_detection, VerifierOutcomeSpace::no_detection) = 1.0;
  return p;
}

inline ComplexMatrix place_on_copy(const ComplexMatrix& proj, CopySlot copy,
                                   const ComplexMatrix& input_part) {
  const ComplexMatrix id3 = ComplexMatrix::Identity(3, 3);
  if (copy == CopySlot::First) {
    return kron3(proj, id3, input_part);
  }
  return kron3(id3, proj, input_part);
}

}  // namespace detail

// E(mu) = (1/4) sum_k (1/2) |beta_k_perp><beta_k_perp| (x) 1 (x) conj(rho_k),
// with the projector on the requested copy. Tr(E) = 3/2 for every mu.
inline HermitianOperator build_error_operator(CopySlot copy, MeanPhotonNumber mu) {
  ComplexMatrix e = ComplexMatrix::Zero(ChoiVariableSpec::total_dim,
                                        ChoiVariableSpec::total_dim);
  for (int k = 0; k < kNumMoneyStates; ++k) {
    const ComplexMatrix proj =
        detail::embed_qubit_projector(squashed_qubit(k).beta_perp);
    const ComplexMatrix rbar = conjugate_state(money_state(k, mu)).matrix();
    e += 0.25 * 0.5 * detail::place_on_copy(proj, copy, rbar);
  }
  return HermitianOperator(std::move(e));
}

// L(mu) = (1/4) sum_k |nd><nd| (x) 1 (x) conj(rho_k). Tr(L) = 3.
inline HermitianOperator build_loss_operator(CopySlot copy, MeanPhotonNumber mu) {
  ComplexMatrix l = ComplexMatrix::Zero(ChoiVariableSpec::total_dim,
                                        ChoiVariableSpec::total_dim);
  const ComplexMatrix nd = detail::no_detection_projector();
  for (int k = 0; k < kNumMoneyStates; ++k) {
    const ComplexMatrix rbar = conjugate_state(money_state(k, mu)).matrix();
    l += 0.25 * detail::place_on_copy(nd, copy, rbar);
  }
  return HermitianOperator(std::move(l));
}

struct OperatorSet {
  HermitianOperator e0;
  HermitianOperator e1;
  HermitianOperator l0;
  HermitianOperator l1;
  double mu;
};

inline OperatorSet build_operator_set(MeanPhotonNumber mu) {
  return {build_error_operator(CopySlot::First, mu),
          build_error_operator(CopySlot::Second, mu),
          build_loss_operator(CopySlot::First, mu),
          build_loss_operator(CopySlot::Second, mu), mu.value()};
}

// The 49 Hermitian constraint rows encoding
//   Tr_{copy1 (x) copy2}(J) = 1_{input}.
// 7 diagonal rows with target 1, then 21 real and 21 imaginary
// off-diagonal rows with target 0. The rows are mutually orthogonal, hence
// linearly independent.
inline std::vector<std::pair<HermitianOperator, double>> tp_constraint_rows() {
  const Index d = ChoiVariableSpec::input_dim;
  const ComplexMatrix id9 = ComplexMatrix::Identity(9, 9);
  const Complex i(0.0, 1.0);
  std::vector<std::pair<HermitianOperator, double>> rows;
  rows.reserve(49);
  for (Index p = 0; p < d; ++p) {
    ComplexMatrix epp = ComplexMatrix::Zero(d, d);
    epp(p, p) = 1.0;
    rows.emplace_back(HermitianOperator(kron(id9, epp)), 1.0);
  }
  for (Index p = 0; p < d; ++p) {
    for (Index q = p + 1; q < d; ++q) {
      ComplexMatrix re = ComplexMatrix::Zero(d, d);
      re(p, q) = 1.0;
      re(q, p) = 1.0;
      rows.emplace_back(HermitianOperator(kron(id9, re)), 0.0);
      ComplexMatrix im = ComplexMatrix::Zero(d, d);
      im(p, q) = i;
      im(q, p) = -i;
      rows.emplace_back(HermitianOperator(kron(id9, im)), 0.0);
    }
  }
  return rows;
}

// Honest expected loss per copy: probability that a pulse stored and
// retrieved with efficiency eta yields no detection.
inline double honest_loss_bound(MeanPhotonNumber mu, double eta) {
  if (!(eta > 0.0) || eta > 1.0) {
    throw std::invalid_argument("honest_loss_bound: eta must be in (0, 1]");
  }
  return std::exp(-eta * mu.value());
}

// Conjugate an operator on copy1 (x) copy2 (x) input by the permutation
// that swaps the two copies. E1 = swap_copies(E0) entrywise.
inline ComplexMatrix swap_copies(const ComplexMatrix& m) {
  const Index n = ChoiVariableSpec::total_dim;
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("swap_copies: expected a 63x63 operator");
  }
  const auto perm = [](Index idx) {
    const Index in = idx % 7;
    const Index c2 = (idx / 7) % 3;
    const Index c1 = idx / 21;
    return (c2 * 3 + c1) * 7 + in;
  };
  ComplexMatrix out(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) {
      out(perm(r), perm(c)) = m(r, c);
    }
  }
  return out;
}

}  // namespace qmoney

#endif  // QMONEY_OPERATORS_HPP
