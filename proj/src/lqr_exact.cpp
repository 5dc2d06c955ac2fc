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

#include "ddd/lqr_exact.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <string>

#include "ddd/error.hpp"

namespace ddd {

namespace {

// (R + B'PB)^{-1} B'PA via Cholesky; no pseudo-inverse fallback.
Matrix riccati_gain(const Matrix& A, const Matrix& B, const Matrix& R, const Matrix& P) {
  const Matrix BtP = B.transpose() * P;
  const Matrix S = symmetrize(R + BtP * B);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success) fail(ErrorKind::Singular, "R + B'PB is not positive definite");
  return llt.solve(BtP * A);
}

void check_shapes(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R) {
  const auto n = A.rows();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n || R.rows() != B.cols() ||
      R.cols() != B.cols())
    fail(ErrorKind::DimensionMismatch, "solve_dare: inconsistent dimensions");
}

}  // namespace

Matrix dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R, const Matrix& P) {
  const Matrix K = riccati_gain(A, B, R, P);
  return P - A.transpose() * P * A + A.transpose() * P * B * K - Q;
}

DareSolution solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R, DareOptions options) {
  check_shapes(A, B, Q, R);
  LqrWeights{Q, R}.validate(A.rows(), B.cols());

  Matrix P = Q;
  for (int it = 1; it <= options.max_iter; ++it) {
    const Matrix K = riccati_gain(A, B, R, P);
    const Matrix next = symmetrize(A.transpose() * P * (A - B * K) + Q);
    P = next;
    if (!P.allFinite()) break;
    const double residual = dare_residual(A, B, Q, R, P).norm();
    if (residual <= options.tol * std::max(1.0, P.norm())) {
      DareSolution sol;
      sol.P = P;
      sol.K = riccati_gain(A, B, R, P);
      sol.residual = residual;
      sol.iterations = it;
      return sol;
    }
  }
  fail(ErrorKind::NotConverged,
       "DARE fixed-point iteration did not converge within " + std::to_string(options.max_iter) + " iterations");
}

DareSolution solve_dare(const LtiSystem& system, const LqrWeights& weights, DareOptions options) {
  system.validate();
  return solve_dare(system.A, system.B, weights.Q, weights.R, options);
}

Matrix closed_loop(const LtiSystem& system, const Matrix& K) {
  if (K.rows() != system.m() || K.cols() != system.n())
    fail(ErrorKind::DimensionMismatch, "gain must be m x n");
  return system.A - system.B * K;
}

StabilityReport is_stabilizing(const LtiSystem& system, const Matrix& K) {
  const double rho = spectral_radius(closed_loop(system, K));
  return {rho < 1.0, rho};
}

Matrix solve_discrete_lyapunov(const Matrix& F, const Matrix& C) {
  const auto n = F.rows();
  const Matrix Ft = F.transpose();
  // vec(F' X F) = (F' (x) F') vec(X) for column-major vec.
  Matrix kron(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = Ft(i, j) * Ft;
  const Matrix lhs = Matrix::Identity(n * n, n * n) - kron;
  const Vector rhs = Eigen::Map<const Vector>(C.data(), n * n);
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) fail(ErrorKind::Singular, "Lyapunov operator is singular");
  const Vector x = lu.solve(rhs);
  return symmetrize(Eigen::Map<const Matrix>(x.data(), n, n));
}

double average_cost(const LtiSystem& system, const LqrWeights& weights, const Matrix& K) {
  const Matrix F = closed_loop(system, K);
  if (spectral_radius(F) >= 1.0) return std::numeric_limits<double>::infinity();
  const Matrix P = solve_discrete_lyapunov(F, weights.Q + K.transpose() * weights.R * K);
  return system.sigma_w * system.sigma_w * P.trace();
}

}  // namespace ddd
