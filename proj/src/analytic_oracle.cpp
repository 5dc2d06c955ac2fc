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

#include "ddd/analytic_oracle.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ddd/error.hpp"
#include "ddd/excitation.hpp"
#include "ddd/lqr_exact.hpp"

namespace ddd {

Matrix e_matrix(Eigen::Index n, Eigen::Index m) {
  Matrix E = Matrix::Zero(2 * n + m, n);
  E.topRows(n).setIdentity();
  return E;
}

Matrix min_norm_solution(const Matrix& D, const Matrix& E) {
  if (D.rows() != E.rows()) fail(ErrorKind::DimensionMismatch, "D and E must have the same number of rows");
  const int rank = numerical_rank(D);
  if (rank < D.rows())
    fail(ErrorKind::RankDeficient, "D_T has rank " + std::to_string(rank) + " < " + std::to_string(D.rows()) +
                                       "; the minimum-norm system has no exact solution in general");
  Eigen::LLT<Matrix> llt(D * D.transpose());
  if (llt.info() != Eigen::Success) fail(ErrorKind::RankDeficient, "D_T D_T' is not positive definite");
  return D.transpose() * llt.solve(E);
}

const char* to_string(CePath path) { return path == CePath::ZeroGain ? "zero-gain" : "model-based"; }

CePrediction ce_prediction(const TrajectoryData& data, const LqrWeights& weights) {
  const auto n = data.n();
  const auto m = data.m();
  CePrediction out;
  out.rank_DT = numerical_rank(combined_matrix(data));
  if (out.rank_DT == 2 * n + m) {
    out.path = CePath::ZeroGain;
    out.K = Matrix::Zero(m, n);
    return out;
  }
  Matrix XU(n + m, data.T);
  XU << data.X0, data.U0;
  if (numerical_rank(XU) < n + m) fail(ErrorKind::RankDeficient, "[X0; U0] is rank deficient; model not identifiable");
  const Matrix AB = data.X1 * pseudo_inverse(XU);
  out.path = CePath::ModelBased;
  out.A_hat = AB.leftCols(n);
  out.B_hat = AB.rightCols(m);
  out.K = solve_dare(out.A_hat, out.B_hat, weights.Q, weights.R).K;
  return out;
}

PsiReport psi_matrix(const TrajectoryData& data, const Matrix& Y) {
  if (Y.rows() != data.T || Y.cols() != data.n()) fail(ErrorKind::DimensionMismatch, "Y must be T x n");
  if (data.W0.rows() != data.n() || data.W0.cols() != data.T)
    fail(ErrorKind::InvalidArgument, "Psi requires the realized noise W0 (simulation only)");
  const Matrix P = data.X0 * Y;
  Eigen::FullPivLU<Matrix> lu(P);
  if (!lu.isInvertible()) fail(ErrorKind::Singular, "X0 Y is singular");
  PsiReport out;
  out.M = Y * lu.solve(Y.transpose());
  const Matrix cross = data.X1 * out.M * data.W0.transpose();
  out.Psi = data.W0 * out.M * data.W0.transpose() - cross - cross.transpose();
  return out;
}

Lemma1Report lemma1_condition(const Matrix& psi) {
  if (psi.rows() != psi.cols()) fail(ErrorKind::DimensionMismatch, "Psi must be square");
  Lemma1Report out;
  out.lambda_max = lambda_max_sym(psi);
  out.borderline = std::abs(out.lambda_max - 1.0) <= 1e-12;
  out.satisfiable = out.lambda_max < 1.0 && !out.borderline;
  return out;
}

double rp_gain_bound(const TrajectoryData& data, const LqrWeights& weights, double eta) {
  const auto n = static_cast<double>(data.n());
  const auto m = static_cast<double>(data.m());
  const Matrix D = combined_matrix(data);
  const int rank = numerical_rank(D);
  if (rank < D.rows()) fail(ErrorKind::RankDeficient, "rp_gain_bound requires D_T of full row rank");
  const double sdd = std::pow(sigma_min(D), 2);
  const double sq = lambda_min_sym(weights.Q);
  const double sr = lambda_min_sym(weights.R);
  const double a = eta * (2.0 * n + m);
  return a / (sr * sdd) * (weights.Q.trace() / sq + a / (sq * sdd));
}

TheoreticalBound rp_bound_theoretical(int T, double eta, const LqrWeights& weights, const LtiSystem& system,
                                      double rho) {
  const auto n = static_cast<int>(system.n());
  const auto m = static_cast<int>(system.m());
  if (T <= n) fail(ErrorKind::InvalidArgument, "rp_bound_theoretical requires T > n");
  if (!(rho > 0.0)) fail(ErrorKind::InvalidArgument, "rho must be positive");
  const double sq = lambda_min_sym(weights.Q);
  const double sr = lambda_min_sym(weights.R);
  const double sp = sigma_min(p2_matrix(system));
  TheoreticalBound out;
  out.C = 2.0 * (n + 1) * (2 * n + m) * eta /
          (std::min(sr, sq) * sp * sp * rho * rho * system.sigma_u * system.sigma_u);
  const double r = out.C / (T - n);
  out.bound = r * (weights.Q.trace() / sq + r);
  return out;
}

double ce_objective_reference(const LqrWeights& weights) { return weights.Q.trace(); }

OracleReport oracle_report(const TrajectoryData& data, const LqrWeights& weights, const LtiSystem& system,
                           double eta, const Matrix& Y, double rho) {
  OracleReport r;
  const Matrix D = combined_matrix(data);
  r.rank_DT = numerical_rank(D);
  const bool full = r.rank_DT == D.rows();
  if (full) r.Y_n = min_norm_solution(D, e_matrix(data.n(), data.m()));
  r.K_predicted = ce_prediction(data, weights).K;
  r.rp_bound = full ? rp_gain_bound(data, weights, eta) : std::numeric_limits<double>::infinity();
  r.rp_bound_theoretical = std::numeric_limits<double>::quiet_NaN();
  if (system.sigma_w > 0.0 && rho > 0.0 && data.T > data.n())
    r.rp_bound_theoretical = rp_bound_theoretical(data.T, eta, weights, system, rho).bound;
  if (Y.size() > 0) {
    r.psi = psi_matrix(data, Y).Psi;
    r.psi_gap = (r.psi - system.A * system.A.transpose()).norm();
    r.lemma1_lambda_max = lemma1_condition(r.psi).lambda_max;
  }
  return r;
}

}  // namespace ddd
