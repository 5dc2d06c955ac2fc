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

/// Stabilizing DARE solution with gain K = (R + B'PB)^{-1} B'PA, u = -K x.
struct DareSolution {
  Matrix P;
  Matrix K;
  double residual = 0.0;  ///< Frobenius norm of the DARE residual at P.
  int iterations = 0;
};

struct DareOptions {
  double tol = 1e-10;  ///< relative residual ||res||_F / max(1, ||P||_F)
  int max_iter = 100000;
};

/// Riccati fixed-point iteration from P0 = Q. Throws NotConverged when the
/// relative residual stays above tol after max_iter sweeps.
DareSolution solve_dare(const LtiSystem& system, const LqrWeights& weights, DareOptions options = {});

/// Same iteration on bare matrices (used for identified models).
DareSolution solve_dare(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R, DareOptions options = {});

/// Residual P - A'PA + A'PB (R + B'PB)^{-1} B'PA - Q.
Matrix dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R, const Matrix& P);

/// A - B K.
Matrix closed_loop(const LtiSystem& system, const Matrix& K);

struct StabilityReport {
  bool stable = false;
  double spectral_radius = 0.0;
};

StabilityReport is_stabilizing(const LtiSystem& system, const Matrix& K);

/// Steady-state average cost sigma_w^2 trace(P_cl) where
/// P_cl = (A-BK)' P_cl (A-BK) + Q + K'RK; +infinity if A - BK is not Schur.
double average_cost(const LtiSystem& system, const LqrWeights& weights, const Matrix& K);

/// Solves X = F' X F + C by Kronecker vectorization; requires rho(F) < 1.
Matrix solve_discrete_lyapunov(const Matrix& F, const Matrix& C);

}  // namespace ddd
