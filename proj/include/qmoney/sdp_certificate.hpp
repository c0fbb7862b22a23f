/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_SDP_CERTIFICATE_HPP
#define QMONEY_SDP_CERTIFICATE_HPP

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qmoney/sdp_problem.hpp"

namespace qmoney::sdp {

// Independent re-verification of a solution against the problem data.
// Recomputes every residual from scratch; it shares nothing with the
// solver's internal state.
struct CertificateReport {
  std::vector<double> equality_residuals;    // |Tr(A_i x) - b_i|
  std::vector<double> inequality_violations; // max(0, Tr(G_j x) - h_j)
  std::vector<double> dual_sign_violations;  // max(0, +/- y_ineq)
  double x_min_eigenvalue = 0.0;
  double dual_slack_min_eigenvalue = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  double worst_equality_residual = 0.0;
  double worst_inequality_violation = 0.0;
  double worst_dual_sign_violation = 0.0;

  bool passes(double feas_tol = 1e-8, double psd_tol = kPsdTol,
              double gap_tol = 1e-6) const {
    return worst_equality_residual <= feas_tol &&
           worst_inequality_violation <= feas_tol &&
           worst_dual_sign_violation <= feas_tol &&
           x_min_eigenvalue >= -psd_tol &&
           dual_slack_min_eigenvalue >= -psd_tol && relative_gap <= gap_tol;
  }

  std::string summary() const {
    std::ostringstream os;
    os << "equality residual " << worst_equality_residual
       << ", inequality violation " << worst_inequality_violation
       << ", dual sign violation " << worst_dual_sign_violation
       << ", min eig(x) " << x_min_eigenvalue << ", min eig(dual slack) "
       << dual_slack_min_eigenvalue << ", gap " << gap << " (relative "
       << relative_gap << ")";
    return os.str();
  }
};

inline CertificateReport check_certificate(const SdpProblem& p,
                                           const SdpSolution& s) {
  CertificateReport rep;
  const ComplexMatrix& x = s.x;
  const double sign = p.sense == Sense::Min ? 1.0 : -1.0;

  for (const auto& t : p.equalities) {
    const double v = hermitian_inner(t.matrix.matrix(), x);
    rep.equality_residuals.push_back(std::abs(v - t.value));
  }
  for (const auto& t : p.inequalities) {
    const double v = hermitian_inner(t.matrix.matrix(), x);
    rep.inequality_violations.push_back(std::max(0.0, v - t.value));
  }

  {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (x + x.adjoint())), Eigen::EigenvaluesOnly);
    rep.x_min_eigenvalue = es.eigenvalues()(0);
  }

  // Dual slack in the user's sense: for Min, Z = C - sum_i y_i A_i with
  // y_ineq <= 0; for Max the signs flip (y is reported in the user sense).
  ComplexMatrix zc = sign * p.objective.matrix();
  const Index me = static_cast<Index>(p.equalities.size());
  for (Index i = 0; i < me; ++i) {
    zc -= (sign * s.y(i)) * p.equalities[i].matrix.matrix();
  }
  for (Index j = 0; j < static_cast<Index>(p.inequalities.size()); ++j) {
    const double yj = sign * s.y(me + j);
    zc -= yj * p.inequalities[j].matrix.matrix();
    rep.dual_sign_violations.push_back(std::max(0.0, yj));
  }
  {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (zc + zc.adjoint())), Eigen::EigenvaluesOnly);
    rep.dual_slack_min_eigenvalue = es.eigenvalues()(0);
  }

  rep.gap = std::abs(s.primal_value - s.dual_value);
  rep.relative_gap = rep.gap / (1.0 + std::abs(s.primal_value));

  const auto worst = [](const std::vector<double>& v) {
    double w = 0.0;
    for (double e : v) w = std::max(w, e);
    return w;
  };
  rep.worst_equality_residual = worst(rep.equality_residuals);
  rep.worst_inequality_violation = worst(rep.inequality_violations);
  rep.worst_dual_sign_violation = worst(rep.dual_sign_violations);
  return rep;
}

}  // namespace qmoney::sdp

#endif  // QMONEY_SDP_CERTIFICATE_HPP
