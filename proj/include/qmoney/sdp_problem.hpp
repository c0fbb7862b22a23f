/*
 * This code is part of qmoney.
 *
 * (C) Copyright 2026 the qmoney developers.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef QMONEY_SDP_PROBLEM_HPP
#define QMONEY_SDP_PROBLEM_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "qmoney/complex_matrix.hpp"

namespace qmoney::sdp {

enum class Sense { Min, Max };

// One linear functional of the Hermitian variable: Tr(matrix * X)
// compared against `value` (equality target or inequality upper bound).
struct LinearTerm {
  HermitianOperator matrix;
  double value;
};

// A small dense semidefinite program over one Hermitian variable X >= 0:
//
//   min/max  Tr(objective * X)
//   s.t.     Tr(A_i X)  = b_i   (equalities)
//            Tr(G_j X) <= h_j   (inequalities)
//
// All constraint data is Hermitian, so every inner product is real.
struct SdpProblem {
  Index variable_dim;
  Sense sense = Sense::Min;
  HermitianOperator objective;
  std::vector<LinearTerm> equalities;
  std::vector<LinearTerm> inequalities;

  // Throws when shapes are inconsistent or the equality rows fail the
  // Gram-matrix rank test (tolerance 1e-8 relative to the top eigenvalue).
  void validate() const {
    if (objective.dim() != variable_dim) {
      throw std::invalid_argument("SdpProblem: objective dim mismatch");
    }
    if (equalities.empty() && inequalities.empty()) {
      throw std::invalid_argument("SdpProblem: at least one constraint required");
    }
    for (const auto& t : equalities) {
      if (t.matrix.dim() != variable_dim) {
        throw std::invalid_argument("SdpProblem: equality dim mismatch");
      }
    }
    for (const auto& t : inequalities) {
      if (t.matrix.dim() != variable_dim) {
        throw std::invalid_argument("SdpProblem: inequality dim mismatch");
      }
    }
    const Index m = static_cast<Index>(equalities.size());
    if (m > 0) {
      RealMatrix gram(m, m);
      for (Index i = 0; i < m; ++i) {
        for (Index j = i; j < m; ++j) {
          const double g = hermitian_inner(equalities[i].matrix.matrix(),
                                           equalities[j].matrix.matrix());
          gram(i, j) = g;
          gram(j, i) = g;
        }
      }
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(gram, Eigen::EigenvaluesOnly);
      const double top = es.eigenvalues().maxCoeff();
      if (!(top > 0.0) || es.eigenvalues().minCoeff() <= 1e-8 * top) {
        throw std::invalid_argument(
            "SdpProblem: equality constraint matrices are linearly dependent");
      }
    }
  }
};

enum class SolveStatus { Optimal, Infeasible, MaxIter, Numerical };

inline std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "OPTIMAL";
    case SolveStatus::Infeasible: return "INFEASIBLE";
    case SolveStatus::MaxIter: return "MAX_ITER";
    case SolveStatus::Numerical: return "NUMERICAL";
  }
  return "UNKNOWN";
}

struct SdpSolution {
  SolveStatus status = SolveStatus::Numerical;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // |primal - dual|
  int iterations = 0;
  ComplexMatrix x;           // primal variable
  RealVector y;              // dual multipliers, equalities then inequalities
  RealVector slacks;         // inequality slacks
  double condition_estimate = 0.0;  // worst Newton-system conditioning seen
  std::string notes;
};

struct SolveOptions {
  double gap_tol = 1e-7;    // relative duality gap at convergence
  double feas_tol = 1e-9;   // primal/dual residual tolerance
  double psd_tol = kPsdTol;
  int max_iter = 200;
  double step_fraction = 0.98;   // fraction-to-boundary factor
  double cond_limit = 1e14;      // Newton system conditioning cutoff
  double divergence_bound = 1e9; // iterate norm cutoff (NUMERICAL)
  double infeasibility_tol = 1e-9;
  // When positive, start from X = I * initial_trace / dim.
  double initial_trace = 0.0;
};

// --- JSON schema ------------------------------------------------------
//
// Matrices are nested arrays (rows) of [re, im] pairs. A problem is
//   {"variable_dim": n, "sense": "min"|"max", "objective": <matrix>,
//    "equalities":   [{"matrix": <matrix>, "value": b}, ...],
//    "inequalities": [{"matrix": <matrix>, "value": h}, ...]}
// and a solution is
//   {"status": ..., "primal_value": ..., "dual_value": ..., "gap": ...,
//    "iterations": ..., "x": <matrix>, "y": [...], "slacks": [...]}

inline nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      row.push_back({m(r, c).real(), m(r, c).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("matrix_from_json: expected non-empty array");
  }
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j.at(0).size());
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (static_cast<Index>(row.size()) != cols) {
      throw std::invalid_argument("matrix_from_json: ragged rows");
    }
    for (Index c = 0; c < cols; ++c) {
      const auto& e = row.at(c);
      m(r, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

inline nlohmann::json problem_to_json(const SdpProblem& p) {
  nlohmann::json j;
  j["variable_dim"] = p.variable_dim;
  j["sense"] = p.sense == Sense::Min ? "min" : "max";
  j["objective"] = matrix_to_json(p.objective.matrix());
  j["equalities"] = nlohmann::json::array();
  for (const auto& t : p.equalities) {
    j["equalities"].push_back(
        {{"matrix", matrix_to_json(t.matrix.matrix())}, {"value", t.value}});
  }
  j["inequalities"] = nlohmann::json::array();
  for (const auto& t : p.inequalities) {
    j["inequalities"].push_back(
        {{"matrix", matrix_to_json(t.matrix.matrix())}, {"value", t.value}});
  }
  return j;
}

inline SdpProblem problem_from_json(const nlohmann::json& j) {
  const std::string sense = j.at("sense").get<std::string>();
  if (sense != "min" && sense != "max") {
    throw std::invalid_argument("problem_from_json: sense must be min or max");
  }
  SdpProblem p{j.at("variable_dim").get<Index>(),
               sense == "min" ? Sense::Min : Sense::Max,
               HermitianOperator(matrix_from_json(j.at("objective"))),
               {},
               {}};
  for (const auto& t : j.at("equalities")) {
    p.equalities.push_back({HermitianOperator(matrix_from_json(t.at("matrix"))),
                            t.at("value").get<double>()});
  }
  for (const auto& t : j.at("inequalities")) {
    p.inequalities.push_back({HermitianOperator(matrix_from_json(t.at("matrix"))),
                              t.at("value").get<double>()});
  }
  return p;
}

inline nlohmann::json solution_to_json(const SdpSolution& s) {
  nlohmann::json j;
  j["status"] = to_string(s.status);
  j["primal_value"] = s.primal_value;
  j["dual_value"] = s.dual_value;
  j["gap"] = s.gap;
  j["iterations"] = s.iterations;
  j["x"] = matrix_to_json(s.x);
  j["y"] = std::vector<double>(s.y.data(), s.y.data() + s.y.size());
  j["slacks"] = std::vector<double>(s.slacks.data(), s.slacks.data() + s.slacks.size());
  j["condition_estimate"] = s.condition_estimate;
  j["notes"] = s.notes;
  return j;
}

inline SdpSolution solution_from_json(const nlohmann::json& j) {
  SdpSolution s;
  const std::string st = j.at("status").get<std::string>();
  if (st == "OPTIMAL") s.status = SolveStatus::Optimal;
  else if (st == "INFEASIBLE") s.status = SolveStatus::Infeasible;
  else if (st == "MAX_ITER") s.status = SolveStatus::MaxIter;
  else s.status = SolveStatus::Numerical;
  s.primal_value = j.at("primal_value").get<double>();
  s.dual_value = j.at("dual_value").get<double>();
  s.gap = j.at("gap").get<double>();
  s.iterations = j.at("iterations").get<int>();
  s.x = matrix_from_json(j.at("x"));
  const auto y = j.at("y").get<std::vector<double>>();
  s.y = Eigen::Map<const RealVector>(y.data(), static_cast<Index>(y.size()));
  const auto sl = j.at("slacks").get<std::vector<double>>();
  s.slacks = Eigen::Map<const RealVector>(sl.data(), static_cast<Index>(sl.size()));
  s.condition_estimate = j.value("condition_estimate", 0.0);
  s.notes = j.value("notes", "");
  return s;
}

}  // namespace qmoney::sdp

#endif  // QMONEY_SDP_PROBLEM_HPP
