/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_COMPLEX_MATRIX_HPP
#define QMONEY_COMPLEX_MATRIX_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace qmoney {

using Complex = std::complex<double>;

// Dense row-major complex matrix. Every operator in this problem is at most
// 63x63, so there is no sparse path.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

// Default tolerances. Chosen for the double-precision eigensolver noise
// floor at dimensions up to 63.
inline constexpr double kHermiticityTol = 1e-10;
inline constexpr double kPsdTol = 1e-8;

// Kronecker products refuse to grow past this output dimension.
inline constexpr Index kMaxKronDim = 10000;

inline bool all_finite(const ComplexMatrix& m) {
  return m.array().isFinite().all();
}

// max_ij |M[i][j] - conj(M[j][i])|
inline double hermiticity_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermiticity_deviation: matrix not square");
  }
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// A square complex matrix certified Hermitian within `hermiticity_tol`.
// Carrier for the money states rho_k, the error/loss operators E and L,
// and the Choi variable J.
class HermitianOperator {
 public:
  explicit HermitianOperator(ComplexMatrix m, double tol = kHermiticityTol)
      : matrix_(std::move(m)), tol_(tol) {
    if (matrix_.rows() != matrix_.cols()) {
      throw std::invalid_argument("HermitianOperator: matrix not square");
    }
    if (matrix_.size() == 0) {
      throw std::invalid_argument("HermitianOperator: empty matrix");
    }
    if (!all_finite(matrix_)) {
      throw std::invalid_argument("HermitianOperator: non-finite entries");
    }
    const double dev = hermiticity_deviation(matrix_);
    if (dev > tol_) {
      throw std::invalid_argument(
          "HermitianOperator: hermiticity deviation " + std::to_string(dev) +
          " exceeds tolerance " + std::to_string(tol_));
    }
  }

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double hermiticity_tol() const { return tol_; }

  double trace() const { return matrix_.trace().real(); }

  // Entrywise (M + M^dagger)/2; removes roundoff-level asymmetry.
  HermitianOperator symmetrized() const {
    ComplexMatrix s = 0.5 * (matrix_ + matrix_.adjoint());
    return HermitianOperator(std::move(s), tol_);
  }

  static HermitianOperator identity(Index n) {
    return HermitianOperator(ComplexMatrix::Identity(n, n));
  }

 private:
  ComplexMatrix matrix_;
  double tol_;
};

// (A (x) B)[(i*bdim+k),(j*bdim+l)] = A[i,j]*B[k,l]; the left factor is the
// slowest-varying index. Shared convention for every composite space here.
inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                          Index max_dim = kMaxKronDim) {
  if (a.rows() * b.rows() > max_dim || a.cols() * b.cols() > max_dim) {
    throw std::length_error("kron: output dimension exceeds limit of " +
                            std::to_string(max_dim));
  }
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline HermitianOperator kron(const HermitianOperator& a,
                              const HermitianOperator& b,
                              Index max_dim = kMaxKronDim) {
  return HermitianOperator(kron(a.matrix(), b.matrix(), max_dim),
                           a.hermiticity_tol() + b.hermiticity_tol());
}

inline ComplexMatrix kron3(const ComplexMatrix& a, const ComplexMatrix& b,
                           const ComplexMatrix& c) {
  return kron(kron(a, b), c);
}

// Real-valued inner product Tr(A B) of two Hermitian matrices.
inline double hermitian_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  return (a.cwiseProduct(b.transpose())).sum().real();
}

}  // namespace qmoney

#endif  // QMONEY_COMPLEX_MATRIX_HPP
