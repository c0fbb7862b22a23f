/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_SDP_SOLVER_HPP
#define QMONEY_SDP_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "qmoney/sdp_problem.hpp"

namespace qmoney::sdp {

// Infeasible-start primal-dual path-following interior-point method with
// Mehrotra predictor-corrector steps.
//
// Internal standard form (always minimization; Max is handled by negating
// the objective):
//
//   min <C,X>  s.t.  Tr(B_k X) = r_k            (equality rows)
//                    Tr(B_k X) + s_j = r_k      (inequality rows, s >= 0)
//                    X >= 0
//
// The variable is a complex Hermitian block plus nonnegative scalar slacks,
// one per inequality. Search directions use the HKM linearization
// Z dX + dZ X = Rc solved through the Schur complement
// M_ik = Re Tr(B_i Z^{-1} B_k X), which is symmetric positive definite for
// Hermitian data (plus s_j/w_j on inequality diagonals). Directions are
// Hermitian-symmetrized after the solve.
//
// Infeasibility is reported through a scaled Farkas certificate: a dual
// improving ray y with b.y = 1, sum_k y_k B_k <= 0 and y <= 0 on
// inequality rows. Conditioning of the Schur complement is monitored; the
// solver gives up with NUMERICAL when it exceeds opts.cond_limit while the
// iterate is still far from the central-path target (near convergence the
// Schur complement is ill-conditioned by nature and the check is skipped).

namespace detail {

struct Triplet {
  Index r;
  Index c;
  Complex v;
};

struct ConstraintData {
  std::vector<Triplet> trip;
  std::vector<Index> rows;  // distinct nonzero rows
  double rhs = 0.0;
  bool is_inequality = false;
};

inline ConstraintData make_constraint(const ComplexMatrix& m, double rhs,
                                      bool is_ineq) {
  ConstraintData c;
  c.rhs = rhs;
  c.is_inequality = is_ineq;
  std::vector<bool> row_seen(m.rows(), false);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index col = 0; col < m.cols(); ++col) {
      const Complex v = m(r, col);
      if (v != Complex(0.0, 0.0)) {
        c.trip.push_back({r, col, v});
        row_seen[r] = true;
      }
    }
  }
  for (Index r = 0; r < m.rows(); ++r) {
    if (row_seen[r]) c.rows.push_back(r);
  }
  return c;
}

// S = B * X restricted to B's nonzero rows.
inline void sparse_left_product(const ConstraintData& b, const ComplexMatrix& x,
                                ComplexMatrix& s) {
  for (Index r : b.rows) s.row(r).setZero();
  for (const Triplet& t : b.trip) s.row(t.r) += t.v * x.row(t.c);
}

// K = Zinv * S where S is nonzero only on `rows`.
inline void row_restricted_product(const ComplexMatrix& zinv,
                                   const ComplexMatrix& s,
                                   const std::vector<Index>& rows,
                                   ComplexMatrix& k) {
  k.setZero();
  for (Index r : rows) k.noalias() += zinv.col(r) * s.row(r);
}

inline Complex sparse_trace_product(const ConstraintData& b,
                                    const ComplexMatrix& k) {
  Complex acc(0.0, 0.0);
  for (const Triplet& t : b.trip) acc += t.v * k(t.c, t.r);
  return acc;
}

inline void add_scaled(const ConstraintData& b, double scale, ComplexMatrix& out) {
  for (const Triplet& t : b.trip) out(t.r, t.c) += scale * t.v;
}

// Largest alpha with X + alpha*D >= 0, via lambda_min(L^-1 D L^-H).
inline double psd_step_limit(const Eigen::LLT<ComplexMatrix>& llt,
                             const ComplexMatrix& d) {
  const auto& l = llt.matrixL();
  ComplexMatrix t1 = l.solve(d);
  ComplexMatrix w = l.solve(t1.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix(0.5 * (w + w.adjoint())), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

inline double positive_step_limit(const RealVector& v, const RealVector& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < v.size(); ++j) {
    if (dv(j) < 0.0) a = std::min(a, -v(j) / dv(j));
  }
  return a;
}

inline ComplexMatrix hermitify(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

}  // namespace detail

inline SdpSolution solve(const SdpProblem& problem,
                         const SolveOptions& opts = SolveOptions{}) {
  using detail::ConstraintData;
  problem.validate();

  const Index n = problem.variable_dim;
  const Index me = static_cast<Index>(problem.equalities.size());
  const Index p = static_cast<Index>(problem.inequalities.size());
  const Index m = me + p;
  const double sign = problem.sense == Sense::Min ? 1.0 : -1.0;

  ComplexMatrix c_obj = sign * problem.objective.matrix();
  c_obj = detail::hermitify(c_obj);

  std::vector<ConstraintData> cons;
  cons.reserve(m);
  RealVector rhs_vec(m);
  for (Index i = 0; i < me; ++i) {
    cons.push_back(detail::make_constraint(problem.equalities[i].matrix.matrix(),
                                           problem.equalities[i].value, false));
    rhs_vec(i) = problem.equalities[i].value;
  }
  for (Index j = 0; j < p; ++j) {
    cons.push_back(detail::make_constraint(problem.inequalities[j].matrix.matrix(),
                                           problem.inequalities[j].value, true));
    rhs_vec(me + j) = problem.inequalities[j].value;
  }

  // Initial point: X and Z are positive multiples of the identity, slacks
  // and their duals strictly positive.
  double xscale;
  if (opts.initial_trace > 0.0) {
    xscale = opts.initial_trace / static_cast<double>(n);
  } else {
    double worst = 1.0;
    for (Index i = 0; i < m; ++i) {
      double fnorm = 0.0;
      for (const auto& t : cons[i].trip) fnorm += std::norm(t.v);
      fnorm = std::sqrt(fnorm);
      worst = std::max(worst, std::abs(rhs_vec(i)) / std::max(1.0, fnorm));
    }
    xscale = worst;
  }
  const double zscale = std::max(1.0, c_obj.norm() / std::sqrt(double(n)));

  ComplexMatrix x = xscale * ComplexMatrix::Identity(n, n);
  ComplexMatrix z = zscale * ComplexMatrix::Identity(n, n);
  RealVector y = RealVector::Zero(m);
  RealVector s(p), w(p);
  for (Index j = 0; j < p; ++j) {
    s(j) = std::max(1.0, std::abs(rhs_vec(me + j)));
    w(j) = zscale;
  }

  SdpSolution sol;
  sol.notes = "primal-dual interior point (Mehrotra predictor-corrector, HKM); "
              "infeasibility via scaled Farkas ray on the dual multipliers";

  const double rhs_scale = m > 0 ? 1.0 + rhs_vec.cwiseAbs().maxCoeff() : 1.0;
  const double obj_scale = 1.0 + c_obj.cwiseAbs().maxCoeff();

  std::vector<ComplexMatrix> kmats(m, ComplexMatrix::Zero(n, n));
  ComplexMatrix smat = ComplexMatrix::Zero(n, n);
  RealMatrix big_m(m, m);
  int bad_cond_streak = 0;

  const auto finish = [&](SolveStatus st, int iters) {
    sol.status = st;
    sol.iterations = iters;
    sol.x = x;
    sol.y = sign * y;
    sol.slacks = s;
    sol.primal_value = sign * (c_obj.cwiseProduct(x.transpose())).sum().real();
    sol.dual_value = sign * rhs_vec.dot(y);
    sol.gap = std::abs(sol.primal_value - sol.dual_value);
    return sol;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // Residuals.
    RealVector rp(m);
    for (Index i = 0; i < m; ++i) {
      detail::sparse_left_product(cons[i], x, smat);
      Complex tr(0.0, 0.0);
      for (Index r : cons[i].rows) tr += smat(r, r);
      rp(i) = rhs_vec(i) - tr.real();
      if (cons[i].is_inequality) rp(i) -= s(i - me);
    }
    ComplexMatrix rd = c_obj - z;
    for (Index i = 0; i < m; ++i) detail::add_scaled(cons[i], -y(i), rd);
    rd = detail::hermitify(rd);
    RealVector rds(p);
    for (Index j = 0; j < p; ++j) rds(j) = -y(me + j) - w(j);

    const double pobj = (c_obj.cwiseProduct(x.transpose())).sum().real();
    const double dobj = rhs_vec.dot(y);
    const double gap = std::abs(pobj - dobj);
    const double xz = (x.cwiseProduct(z.transpose())).sum().real();
    const double comp = (xz + (p > 0 ? s.dot(w) : 0.0)) / double(n + p);

    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    double dinf = rd.cwiseAbs().maxCoeff();
    if (p > 0) dinf = std::max(dinf, rds.cwiseAbs().maxCoeff());

    if (pinf <= opts.feas_tol * rhs_scale && dinf <= opts.feas_tol * obj_scale &&
        gap <= opts.gap_tol * (1.0 + std::abs(pobj)) &&
        comp * double(n + p) <= 10.0 * opts.gap_tol * (1.0 + std::abs(pobj))) {
      return finish(SolveStatus::Optimal, iter);
    }

    // Farkas certificate for primal infeasibility.
    const double ray_obj = rhs_vec.dot(y);
    if (ray_obj > 1.0 && pinf > 10.0 * opts.feas_tol * rhs_scale) {
      ComplexMatrix ray = ComplexMatrix::Zero(n, n);
      for (Index i = 0; i < m; ++i) detail::add_scaled(cons[i], y(i) / ray_obj, ray);
      ray = detail::hermitify(ray);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(ray, Eigen::EigenvaluesOnly);
      bool slack_ok = true;
      for (Index j = 0; j < p; ++j) {
        if (y(me + j) / ray_obj > opts.infeasibility_tol) slack_ok = false;
      }
      if (slack_ok && es.eigenvalues().maxCoeff() <= opts.infeasibility_tol) {
        sol.notes += "; dual improving ray found";
        return finish(SolveStatus::Infeasible, iter);
      }
    }

    if (x.cwiseAbs().maxCoeff() > opts.divergence_bound ||
        y.cwiseAbs().maxCoeff() > opts.divergence_bound) {
      sol.notes += "; iterates diverged";
      return finish(SolveStatus::Numerical, iter);
    }

    // Factor the barrier blocks.
    Eigen::LLT<ComplexMatrix> llt_z(z);
    Eigen::LLT<ComplexMatrix> llt_x(x);
    if (llt_z.info() != Eigen::Success || llt_x.info() != Eigen::Success) {
      sol.notes += "; Cholesky of an iterate failed";
      return finish(SolveStatus::Numerical, iter);
    }
    const ComplexMatrix zinv = llt_z.solve(ComplexMatrix::Identity(n, n));

    // Schur complement M_ik = Re Tr(B_i Z^-1 B_k X) (+ slack diagonal).
    for (Index k = 0; k < m; ++k) {
      detail::sparse_left_product(cons[k], x, smat);
      detail::row_restricted_product(zinv, smat, cons[k].rows, kmats[k]);
    }
    for (Index i = 0; i < m; ++i) {
      for (Index k = i; k < m; ++k) {
        const double v = detail::sparse_trace_product(cons[i], kmats[k]).real();
        big_m(i, k) = v;
        big_m(k, i) = v;
      }
    }
    for (Index j = 0; j < p; ++j) big_m(me + j, me + j) += s(j) / w(j);

    Eigen::SelfAdjointEigenSolver<RealMatrix> mes(big_m);
    if (mes.info() != Eigen::Success) {
      sol.notes += "; Schur complement eigensolver failed";
      return finish(SolveStatus::Numerical, iter);
    }
    const double lmax = mes.eigenvalues().maxCoeff();
    const double lmin = mes.eigenvalues().minCoeff();
    const double cond = lmax / std::max(lmin, lmax * 1e-18);
    sol.condition_estimate = std::max(sol.condition_estimate, cond);
    const bool far_from_target =
        comp * double(n + p) > 1e3 * opts.gap_tol * (1.0 + std::abs(pobj)) ||
        pinf > 1e3 * opts.feas_tol * rhs_scale;
    if (lmin <= 0.0 || cond > opts.cond_limit) {
      if (far_from_target && ++bad_cond_streak >= 3) {
        sol.notes += "; Newton system conditioning exceeded limit";
        return finish(SolveStatus::Numerical, iter);
      }
    } else {
      bad_cond_streak = 0;
    }
    const RealVector inv_eigs =
        mes.eigenvalues().cwiseMax(lmax * 1e-15).cwiseInverse();
    const auto solve_schur = [&](const RealVector& r) -> RealVector {
      return mes.eigenvectors() *
             (inv_eigs.asDiagonal() * (mes.eigenvectors().transpose() * r));
    };

    const ComplexMatrix rd_x = rd * x;

    // One Newton solve for a given complementarity right-hand side.
    struct Direction {
      ComplexMatrix dx, dz;
      RealVector dy, ds, dw;
    };
    const auto newton = [&](const ComplexMatrix& rc_mat,
                            const RealVector& rc_slack) -> Direction {
      ComplexMatrix n0 = llt_z.solve(rc_mat - rd_x);
      RealVector rhs(m);
      for (Index i = 0; i < m; ++i) {
        rhs(i) = rp(i) - detail::sparse_trace_product(cons[i], n0).real();
        if (cons[i].is_inequality) {
          const Index j = i - me;
          rhs(i) -= (rc_slack(j) - s(j) * rds(j)) / w(j);
        }
      }
      Direction d;
      d.dy = solve_schur(rhs);
      d.dz = rd;
      for (Index i = 0; i < m; ++i) detail::add_scaled(cons[i], -d.dy(i), d.dz);
      d.dz = detail::hermitify(d.dz);
      d.dx = n0;
      for (Index i = 0; i < m; ++i) d.dx.noalias() += d.dy(i) * kmats[i];
      d.dx = detail::hermitify(d.dx);
      d.dw.resize(p);
      d.ds.resize(p);
      for (Index j = 0; j < p; ++j) {
        d.dw(j) = rds(j) - d.dy(me + j);
        d.ds(j) = (rc_slack(j) - s(j) * d.dw(j)) / w(j);
      }
      return d;
    };

    // Predictor (affine scaling).
    const ComplexMatrix zx = z * x;
    RealVector rc_aff(p);
    for (Index j = 0; j < p; ++j) rc_aff(j) = -s(j) * w(j);
    Direction aff = newton(-zx, rc_aff);

    double ap = std::min({1.0, detail::psd_step_limit(llt_x, aff.dx),
                          detail::positive_step_limit(s, aff.ds)});
    double ad = std::min({1.0, detail::psd_step_limit(llt_z, aff.dz),
                          detail::positive_step_limit(w, aff.dw)});
    const double comp_aff =
        (((x + ap * aff.dx).cwiseProduct((z + ad * aff.dz).transpose())).sum().real() +
         (p > 0 ? (s + ap * aff.ds).dot(w + ad * aff.dw) : 0.0)) /
        double(n + p);
    double sigma = std::pow(std::max(comp_aff, 0.0) / comp, 3.0);
    sigma = std::clamp(sigma, 1e-10, 0.99999);

    // Corrector.
    ComplexMatrix rc_mat = sigma * comp * ComplexMatrix::Identity(n, n) - zx -
                           aff.dz * aff.dx;
    RealVector rc_corr(p);
    for (Index j = 0; j < p; ++j) {
      rc_corr(j) = sigma * comp - s(j) * w(j) - aff.ds(j) * aff.dw(j);
    }
    Direction dir = newton(rc_mat, rc_corr);

    ap = std::min(1.0, opts.step_fraction *
                           std::min(detail::psd_step_limit(llt_x, dir.dx),
                                    detail::positive_step_limit(s, dir.ds)));
    ad = std::min(1.0, opts.step_fraction *
                           std::min(detail::psd_step_limit(llt_z, dir.dz),
                                    detail::positive_step_limit(w, dir.dw)));

    x = detail::hermitify(x + ap * dir.dx);
    z = detail::hermitify(z + ad * dir.dz);
    y += ad * dir.dy;
    if (p > 0) {
      s += ap * dir.ds;
      w += ad * dir.dw;
    }
  }

  sol.notes += "; iteration cap reached";
  return finish(SolveStatus::MaxIter, opts.max_iter);
}

}  // namespace qmoney::sdp

#endif  // QMONEY_SDP_SOLVER_HPP
