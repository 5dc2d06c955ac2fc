/*
 Copyright 2026 The ddd-lqr-lab Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <string>
#include <vector>

#include "ddd/conic_solver.hpp"
#include "ddd/linalg.hpp"
#include "ddd/lti_lab.hpp"

namespace ddd {

enum class SdpKind { CertaintyEquivalence, RobustnessPromoting };
enum class RpForm { Full, Epigraph };

const char* to_string(SdpKind kind);
const char* to_string(RpForm form);
RpForm rp_form_from_string(const std::string& name);

/// LMI encoding of a data-driven LQR program plus the map back to (Y, X, slack).
///
/// X0 Y must be symmetric for the LMIs to make sense. When n > 1 the
/// n(n-1)/2 symmetry conditions are eliminated exactly: vec(Y) = y_basis * xi
/// where xi holds the first `y_free` solver variables. For n = 1 y_basis = I.
/// X follows as m(m+1)/2 variables (upper triangle, column by column), then the
/// slack: S (upper triangle) in the full form or t_1..t_T in the epigraph form.
struct DddProblem {
  LmiProblem lmi;
  SdpKind kind = SdpKind::CertaintyEquivalence;
  RpForm form = RpForm::Epigraph;
  double eta = 0.0;
  int n = 0;
  int m = 0;
  int T = 0;
  bool underdetermined = false;  ///< T < 2n + m
  Matrix y_basis;                ///< (T n) x y_free
  int y_free = 0;
  int x_offset = 0;
  int slack_offset = 0;

  Matrix unpack_Y(const Vector& z) const;
  Matrix unpack_X(const Vector& z) const;
  /// Full form: T x T S. Epigraph form: T x 1 column of t. CE: empty.
  Matrix unpack_slack(const Vector& z) const;
};

/// min tr(Q X0 Y) + tr(X) s.t. [[X0Y - I, X1Y], [., X0Y]] >= 0, [[X, sqrt(R) U0 Y], [., X0Y]] >= 0.
DddProblem build_ce(const TrajectoryData& data, const LqrWeights& weights);

/// The CE program plus eta tr(S) with [[S, Y], [Y', X0Y]] >= 0 (full), or
/// eta sum t_i with [[t_i, Y_i], [Y_i', X0Y]] >= 0 for every row Y_i (epigraph).
DddProblem build_rp(const TrajectoryData& data, const LqrWeights& weights, double eta, RpForm form = RpForm::Epigraph);

struct DddDiagnostics {
  double norm_X0Y = 0.0;        ///< spectral norms
  double norm_X0Y_minus_I = 0.0;
  double norm_U0Y = 0.0;
  double norm_X1Y = 0.0;
  double sigma_min_X0Y = 0.0;
};

struct DddSolution {
  SdpKind kind = SdpKind::CertaintyEquivalence;
  RpForm form = RpForm::Epigraph;
  double eta = 0.0;
  Matrix Y;
  Matrix X;
  Matrix slack;  ///< see DddProblem::unpack_slack
  Matrix K;      ///< empty when gain recovery failed
  bool gain_recovered = false;
  std::string gain_error;
  double objective = 0.0;
  SolveResult solver;
  DddDiagnostics diagnostics;
};

DddDiagnostics diagnostics(const TrajectoryData& data, const Matrix& Y);

/// Solves a built problem and recovers the gain; never throws on solver failure.
DddSolution solve_problem(const DddProblem& problem, const TrajectoryData& data, const SolverSettings& settings = {});

DddSolution solve_ce(const TrajectoryData& data, const LqrWeights& weights, const SolverSettings& settings = {});
DddSolution solve_rp(const TrajectoryData& data, const LqrWeights& weights, double eta, RpForm form = RpForm::Epigraph,
                     const SolverSettings& settings = {});

/// K = -U0 Y (X0 Y)^{-1}. cond_tol < 0 selects 1e-8 * sigma_max(X0 Y). Throws
/// Error(Singular) when sigma_min(X0 Y) < cond_tol.
Matrix recover_gain(const Matrix& U0, const Matrix& X0, const Matrix& Y, double cond_tol = -1.0);

/// tr(Q X0Y) + tr(sqrt(R) U0Y (X0Y)^{-1} (sqrt(R) U0Y)'). Requires X0Y > 0.
double reduced_objective_ce(const TrajectoryData& data, const LqrWeights& weights, const Matrix& Y);

/// reduced_objective_ce + eta tr(Y (X0Y)^{-1} Y').
double reduced_objective_rp(const TrajectoryData& data, const LqrWeights& weights, double eta, const Matrix& Y);

/// Minimum eigenvalue of every LMI block rebuilt from (Y, X, slack) directly,
/// in the order: block 1, block 2, then the regularizer block(s).
std::vector<double> verify_feasibility(const TrajectoryData& data, const LqrWeights& weights,
                                       const DddSolution& solution);

}  // namespace ddd
