/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_EIG_HPP
#define QMONEY_EIG_HPP

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qmoney/complex_matrix.hpp"

namespace qmoney {

struct EigenDecomposition {
  RealVector eigenvalues;     // ascending
  ComplexMatrix eigenvectors; // columns; unitary
};

// Full Hermitian eigendecomposition, eigenvalues ascending. Throws on the
// (rare) failure of the tridiagonal QR iteration to converge.
inline EigenDecomposition eig_hermitian(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

inline double min_eigenvalue(const HermitianOperator& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m.matrix(),
                                                      Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("min_eigenvalue: eigensolver did not converge");
  }
  return solver.eigenvalues()(0);
}

// PSD within tolerance: smallest eigenvalue >= -tol.
inline bool is_psd(const HermitianOperator& m, double tol = kPsdTol) {
  return min_eigenvalue(m) >= -tol;
}

}  // namespace qmoney

#endif  // QMONEY_EIG_HPP
