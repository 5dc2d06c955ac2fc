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

#include "ddd/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <limits>

#include "ddd/error.hpp"

namespace ddd {

double rank_tolerance(const Matrix& m, double smax) {
  const auto dim = static_cast<double>(std::max(m.rows(), m.cols()));
  return dim * smax * std::numeric_limits<double>::epsilon() * 100.0;
}

Vector singular_values(const Matrix& m) {
  if (m.size() == 0) return Vector();
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

int numerical_rank(const Matrix& m) {
  const Vector sv = singular_values(m);
  if (sv.size() == 0) return 0;
  const double tol = rank_tolerance(m, sv(0));
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  return rank;
}

double sigma_min(const Matrix& m) {
  const Vector sv = singular_values(m);
  return sv.size() == 0 ? 0.0 : sv(sv.size() - 1);
}

double sigma_max(const Matrix& m) {
  const Vector sv = singular_values(m);
  return sv.size() == 0 ? 0.0 : sv(0);
}

double spectral_radius(const Matrix& square) {
  if (square.rows() != square.cols()) fail(ErrorKind::DimensionMismatch, "spectral_radius: matrix not square");
  if (square.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(square, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double lambda_max_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double lambda_min_sym(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix sqrt_spd(const Matrix& m, double floor) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, "sqrt_spd: matrix not square");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m));
  if (es.eigenvalues().minCoeff() <= floor)
    fail(ErrorKind::InvalidArgument, "sqrt_spd: matrix is not positive definite");
  return es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
}

Matrix pseudo_inverse(const Matrix& m) {
  if (m.size() == 0) return Matrix(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double tol = rank_tolerance(m, sv(0));
  Vector inv(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) inv(i) = sv(i) > tol ? 1.0 / sv(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

bool is_symmetric(const Matrix& m, double tol) {
  return m.rows() == m.cols() && (m.size() == 0 || (m - m.transpose()).cwiseAbs().maxCoeff() <= tol);
}

}  // namespace ddd
