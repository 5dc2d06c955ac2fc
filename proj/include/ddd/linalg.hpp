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

#include <Eigen/Dense>

#include <cstddef>

namespace ddd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Numerical rank threshold: max(rows, cols) * sigma_max * eps * 100.
double rank_tolerance(const Matrix& m, double sigma_max);

/// Singular values in decreasing order.
Vector singular_values(const Matrix& m);

/// Rank from singular values with the module-wide tolerance.
int numerical_rank(const Matrix& m);

/// Smallest singular value (min(rows, cols)-th); zero for empty matrices.
double sigma_min(const Matrix& m);
double sigma_max(const Matrix& m);

double spectral_radius(const Matrix& square);

/// Largest eigenvalue of the symmetric part.
double lambda_max_sym(const Matrix& m);
double lambda_min_sym(const Matrix& m);

/// Principal square root of a symmetric positive definite matrix. Throws
/// Error(InvalidArgument) if the smallest eigenvalue is not above `floor`.
Matrix sqrt_spd(const Matrix& m, double floor = 0.0);

/// Moore-Penrose pseudo-inverse via SVD with the rank tolerance above.
Matrix pseudo_inverse(const Matrix& m);

bool is_symmetric(const Matrix& m, double tol);

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

}  // namespace ddd
