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

#include "ddd/excitation.hpp"

#include <cmath>

#include "ddd/error.hpp"

namespace ddd {

Matrix hankel(const Matrix& F, int depth) {
  const auto s = F.rows();
  const auto T = static_cast<int>(F.cols());
  if (depth < 1 || depth > T) fail(ErrorKind::InvalidArgument, "hankel depth must satisfy 1 <= k <= T");
  const int cols = T - depth + 1;
  Matrix H(depth * s, cols);
  for (int i = 0; i < depth; ++i) H.middleRows(i * s, s) = F.middleCols(i, cols);
  return H;
}

PeReport pe_check(const Matrix& F, int depth) {
  PeReport report;
  report.order = depth;
  report.required_rank = depth * static_cast<int>(F.rows());
  const auto T = static_cast<int>(F.cols());
  if (depth < 1 || depth > T) {
    report.reason = "depth outside 1..T";
    return report;
  }
  const Matrix H = hankel(F, depth);
  const Vector sv = singular_values(H);
  const double tol = sv.size() ? rank_tolerance(H, sv(0)) : 0.0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++report.hankel_rank;
  // With fewer columns than rows the row-rank minimum singular value is zero.
  report.min_singular_value = H.cols() >= H.rows() && sv.size() ? sv(sv.size() - 1) : 0.0;
  if (T - depth + 1 < report.required_rank) report.reason = "too few columns: T - k + 1 < k s";
  report.is_pe = report.hankel_rank == report.required_rank;
  return report;
}

FundamentalRankReport fundamental_rank_check(const Matrix& X0, const Matrix& V0) {
  if (X0.cols() != V0.cols()) fail(ErrorKind::DimensionMismatch, "X0 and V0 must have the same number of columns");
  const auto n = static_cast<int>(X0.rows());
  const auto mn = static_cast<int>(V0.rows());  // m + n
  FundamentalRankReport report;
  report.required_rank = n + mn;
  Matrix stacked(X0.rows() + V0.rows(), X0.cols());
  stacked << X0, V0;
  report.rank = numerical_rank(stacked);
  report.full_rank = report.rank == report.required_rank;
  report.inconclusive = !pe_check(V0, n + 1).is_pe;
  return report;
}

namespace {

double log_in(double x, LogBase base) {
  switch (base) {
    case LogBase::Two:
      return std::log2(x);
    case LogBase::Ten:
      return std::log10(x);
    case LogBase::Natural:
      break;
  }
  return std::log(x);
}

void check_dims(int m, int n, int T) {
  if (m < 1 || n < 1 || T < 1) fail(ErrorKind::InvalidArgument, "m, n, T must be positive");
}

}  // namespace

double lambda_threshold(int m, int n, int T, LogBase base) {
  check_dims(m, n, T);
  const double a = log_in(2.0 * (n + 1) * (m + n), base);
  const double b = log_in(2.0 * T * (m + n), base);
  return (n + 1.0) * (m + n) * a * a * b * b;
}

double log_epsilon_T(int m, int n, int T, LogBase base) {
  check_dims(m, n, T);
  const double a = log_in(2.0 * (n + 1) * (m + n), base);
  const double base_value = 2.0 * T * (m + n);
  const double exponent = -a * a * log_in(base_value, base);
  return exponent * std::log(base_value);
}

double epsilon_T(int m, int n, int T, LogBase base) { return std::exp(log_epsilon_T(m, n, T, base)); }

double hankel_sv_bound(int T, int n, double sigma_z) {
  if (T <= n) fail(ErrorKind::InvalidArgument, "hankel_sv_bound requires T > n");
  return std::sqrt(static_cast<double>(T - n)) * sigma_z / std::sqrt(2.0);
}

double empirical_rho(const Matrix& X0, const Matrix& Z0) {
  if (X0.cols() != Z0.cols()) fail(ErrorKind::DimensionMismatch, "X0 and Z0 must have the same number of columns");
  const auto n = static_cast<int>(X0.rows());
  const Matrix H = hankel(Z0, n + 1);
  if (H.cols() < H.rows()) fail(ErrorKind::RankDeficient, "empirical_rho: Hankel matrix has fewer columns than rows");
  const Vector sv = singular_values(H);
  const double h_min = sv(sv.size() - 1);
  if (h_min <= rank_tolerance(H, sv(0))) fail(ErrorKind::RankDeficient, "empirical_rho: degenerate Hankel matrix");
  Matrix stacked(X0.rows() + Z0.rows(), X0.cols());
  stacked << X0, Z0;
  return sigma_min(stacked) * std::sqrt(n + 1.0) / h_min;
}

Matrix p2_matrix(const LtiSystem& system) {
  system.validate();
  if (!(system.sigma_w > 0.0)) fail(ErrorKind::InvalidArgument, "P2 requires sigma_w > 0");
  const auto n = system.n();
  const auto m = system.m();
  Matrix P = Matrix::Zero(2 * n + m, 2 * n + m);
  P.topLeftCorner(n + m, n + m).setIdentity();
  P.block(n + m, 0, n, n) = system.A;
  P.block(n + m, n, n, m) = system.B;
  P.block(n + m, n + m, n, n) = (system.sigma_w / system.sigma_u) * Matrix::Identity(n, n);
  return P;
}

CombinedBound combined_sv_bound(const LtiSystem& system, int T, double rho) {
  if (!(rho > 0.0)) fail(ErrorKind::InvalidArgument, "rho must be positive");
  const auto n = static_cast<int>(system.n());
  if (T <= n) fail(ErrorKind::InvalidArgument, "combined_sv_bound requires T > n");
  CombinedBound out;
  out.sigma_min_p2 = sigma_min(p2_matrix(system));
  out.bound = out.sigma_min_p2 * std::sqrt(static_cast<double>(T - n)) * rho * system.sigma_u /
              std::sqrt(2.0 * (n + 1));
  return out;
}

BoundReport bound_report(const LtiSystem& system, int T, double rho, double c_constant, LogBase base) {
  const auto n = static_cast<int>(system.n());
  const auto m = static_cast<int>(system.m());
  BoundReport r;
  r.lambda_value = lambda_threshold(m, n, T, base);
  r.epsilon_T = epsilon_T(m, n, T, base);
  r.hankel_bound = hankel_sv_bound(T, n, system.sigma_u);
  r.combined_bound = combined_sv_bound(system, T, rho).bound;
  r.rho_used = rho;
  r.c_constant = c_constant;
  r.horizon_admissible = T >= c_constant * r.lambda_value;
  return r;
}

}  // namespace ddd
