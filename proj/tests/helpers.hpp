// Shared test utilities: deterministic random matrices/vectors and
// reference channels built independently of the library's SDP path.
#ifndef QMONEY_TESTS_HELPERS_HPP
#define QMONEY_TESTS_HELPERS_HPP

#include "qmoney/complex_matrix.hpp"
#include "qmoney/operators.hpp"
#include "qmoney/philox.hpp"
#include "qmoney/states.hpp"

namespace qmoney_tests {

using qmoney::Complex;
using qmoney::ComplexMatrix;
using qmoney::HermitianOperator;
using qmoney::Index;
using qmoney::RandomStream;

inline double uniform_pm1(RandomStream& rng) { return 2.0 * rng.next_double() - 1.0; }

inline ComplexMatrix random_complex(RandomStream& rng, Index rows, Index cols) {
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = Complex(uniform_pm1(rng), uniform_pm1(rng));
    }
  }
  return m;
}

inline HermitianOperator random_hermitian(RandomStream& rng, Index n) {
  ComplexMatrix g = random_complex(rng, n, n);
  return HermitianOperator(ComplexMatrix(0.5 * (g + g.adjoint())));
}

inline qmoney::ComplexVector random_unit_vector(RandomStream& rng, Index n) {
  qmoney::ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(uniform_pm1(rng), uniform_pm1(rng));
  return v / v.norm();
}

// Choi matrix (unnormalized convention) of a channel given by Kraus
// operators mapping the 7-dim input to copy1 (x) copy2.
inline ComplexMatrix choi_from_kraus(const std::vector<ComplexMatrix>& kraus) {
  const Index din = qmoney::kStateDim;
  const Index dout = 9;
  ComplexMatrix j = ComplexMatrix::Zero(dout * din, dout * din);
  for (const ComplexMatrix& k : kraus) {
    for (Index a = 0; a < din; ++a) {
      for (Index b = 0; b < din; ++b) {
        const ComplexMatrix block = k.col(a) * k.col(b).adjoint();
        for (Index r = 0; r < dout; ++r) {
          for (Index c = 0; c < dout; ++c) {
            j(r * din + a, c * din + b) += block(r, c);
          }
        }
      }
    }
  }
  return j;
}

// Output basis vector |c1, c2> in the 9-dim two-copy space.
inline qmoney::ComplexVector copy_pair(Index c1, Index c2) {
  qmoney::ComplexVector v = qmoney::ComplexVector::Zero(9);
  v(c1 * 3 + c2) = 1.0;
  return v;
}

// The honest single-verifier channel: the stored state goes to copy1
// (vacuum and multiphoton flags squash to no-detection), copy2 always
// reports no-detection.
inline ComplexMatrix honest_single_copy_choi() {
  using namespace qmoney;
  const Index nd = VerifierOutcomeSpace::no_detection;
  std::vector<ComplexMatrix> kraus;
  const auto ket_out = [&](Index c1) { return copy_pair(c1, nd); };
  const auto add = [&](Index out1, Index in) {
    ComplexMatrix k = ComplexMatrix::Zero(9, kStateDim);
    k.col(in) = ket_out(out1);
    kraus.push_back(k);
  };
  add(nd, kVacuumIndex);
  add(VerifierOutcomeSpace::bit0, kHIndex);
  add(VerifierOutcomeSpace::bit1, kVIndex);
  for (int m = 0; m < 4; ++m) add(nd, kMultiphotonBase + m);
  return choi_from_kraus(kraus);
}

// Intercept-resend attack: measure the qubit sector in a random basis and
// hand both verifiers a fresh copy of the outcome; multiphoton flags give
// the adversary full information, vacuum forces a double no-detection.
inline ComplexMatrix intercept_resend_choi() {
  using namespace qmoney;
  const Index nd = VerifierOutcomeSpace::no_detection;
  std::vector<ComplexMatrix> kraus;

  {
    ComplexMatrix k = ComplexMatrix::Zero(9, kStateDim);
    k.col(kVacuumIndex) = copy_pair(nd, nd);
    kraus.push_back(k);
  }
  // Measurement in the basis of money state m yields m's qubit or its
  // complement; each basis is chosen with probability 1/2 (bases repeat
  // over m = 0,1, so weight 1/2 per basis splits into 1/4 per m).
  for (int m = 0; m < 2; ++m) {
    const SquashedQubit q = squashed_qubit(m);
    for (const Eigen::Vector2cd& outcome : {q.beta, q.beta_perp}) {
      qmoney::ComplexVector out3 = qmoney::ComplexVector::Zero(3);
      out3.head<2>() = outcome;
      qmoney::ComplexVector both = qmoney::ComplexVector::Zero(9);
      for (Index c1 = 0; c1 < 3; ++c1) {
        for (Index c2 = 0; c2 < 3; ++c2) {
          both(c1 * 3 + c2) = out3(c1) * out3(c2);
        }
      }
      ComplexMatrix k = ComplexMatrix::Zero(9, kStateDim);
      k.col(kHIndex) = std::sqrt(0.5) * both * std::conj(outcome(0));
      k.col(kVIndex) = std::sqrt(0.5) * both * std::conj(outcome(1));
      kraus.push_back(k);
    }
  }
  // Multiphoton flags reveal k exactly; resend two perfect copies.
  for (int m = 0; m < 4; ++m) {
    const SquashedQubit q = squashed_qubit(m);
    qmoney::ComplexVector out3 = qmoney::ComplexVector::Zero(3);
    out3.head<2>() = q.beta;
    qmoney::ComplexVector both = qmoney::ComplexVector::Zero(9);
    for (Index c1 = 0; c1 < 3; ++c1) {
      for (Index c2 = 0; c2 < 3; ++c2) {
        both(c1 * 3 + c2) = out3(c1) * out3(c2);
      }
    }
    ComplexMatrix k = ComplexMatrix::Zero(9, kStateDim);
    k.col(kMultiphotonBase + m) = both;
    kraus.push_back(k);
  }
  return choi_from_kraus(kraus);
}

}  // namespace qmoney_tests

#endif  // QMONEY_TESTS_HELPERS_HPP
