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

#include "ddd/linalg.hpp"
#include "ddd/lti_lab.hpp"

namespace ddd {

/// E = [I_n; 0_{m x n}; 0_{n x n}].
Matrix e_matrix(Eigen::Index n, Eigen::Index m);

/// Y_n = D' (D D')^{-1} E. Throws Error(RankDeficient) when D lacks full row rank.
Matrix min_norm_solution(const Matrix& D, const Matrix& E);

enum class CePath { ZeroGain, ModelBased };
const char* to_string(CePath path);

struct CePrediction {
  Matrix K;
  CePath path = CePath::ZeroGain;
  int rank_DT = 0;
  Matrix A_hat;  ///< least-squares model, model-based path only
  Matrix B_hat;
};

/// Gain the CE program must return: zero when D_T has full row rank, otherwise
/// the DARE gain of the least-squares model X1 [X0; U0]^+. Throws
/// Error(RankDeficient) if [X0; U0] is rank deficient on the model-based path.
CePrediction ce_prediction(const TrajectoryData& data, const LqrWeights& weights);

/// Simulation-only: requires the realized noise W0.
struct PsiReport {
  Matrix M;    ///< Y (X0 Y)^{-1} Y'
  Matrix Psi;  ///< W0 M W0' - X1 M W0' - W0 M X1'
};
PsiReport psi_matrix(const TrajectoryData& data, const Matrix& Y);

struct Lemma1Report {
  double lambda_max = 0.0;
  bool satisfiable = false;  ///< some eta >= 1 gives Psi <= (1 - 1/eta) I
  bool borderline = false;   ///< lambda_max within 1e-12 of 1
};
Lemma1Report lemma1_condition(const Matrix& psi);

/// Data-dependent bound on ||K_rp||^2 for the RP program with weight eta.
/// Throws Error(RankDeficient) when D_T lacks full row rank.
double rp_gain_bound(const TrajectoryData& data, const LqrWeights& weights, double eta);

struct TheoreticalBound {
  double bound = 0.0;
  double C = 0.0;
};

/// (C/(T-n)) [tr Q / sigma_min(Q) + C/(T-n)] with
/// C = 2(n+1)(2n+m) eta / (min(sigma_min R, sigma_min Q) sigma_min(P2)^2 rho^2 sigma_u^2).
TheoreticalBound rp_bound_theoretical(int T, double eta, const LqrWeights& weights, const LtiSystem& system,
                                      double rho);

/// Optimal CE objective under full-rank data: tr(Q).
double ce_objective_reference(const LqrWeights& weights);

struct OracleReport {
  Matrix Y_n;  ///< empty when D_T is rank deficient
  int rank_DT = 0;
  Matrix K_predicted;
  Matrix psi;  ///< empty unless a solution Y is supplied
  double psi_gap = 0.0;
  double lemma1_lambda_max = 0.0;
  double rp_bound = 0.0;              ///< +inf when D_T is rank deficient
  double rp_bound_theoretical = 0.0;  ///< NaN unless sigma_w > 0 and rho > 0
};

/// Collects the oracle quantities for one data set. Y (T x n) is an optimizer
/// used for the Psi diagnostics and may be empty.
OracleReport oracle_report(const TrajectoryData& data, const LqrWeights& weights, const LtiSystem& system,
                           double eta, const Matrix& Y, double rho);

}  // namespace ddd
