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

#include "ddd/ddd_sdp.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

#include "ddd/error.hpp"

namespace ddd {

const char* to_string(SdpKind kind) {
  return kind == SdpKind::CertaintyEquivalence ? "ce" : "rp";
}

const char* to_string(RpForm form) { return form == RpForm::Full ? "full" : "epigraph"; }

RpForm rp_form_from_string(const std::string& name) {
  if (name == "full") return RpForm::Full;
  if (name == "epigraph") return RpForm::Epigraph;
  fail(ErrorKind::InvalidArgument, "unknown RP form '" + name + "' (expected full or epigraph)");
}

namespace {

void check_data(const TrajectoryData& data, const LqrWeights& weights) {
  const auto n = data.X0.rows();
  const auto m = data.U0.rows();
  const auto T = data.X0.cols();
  if (n < 1 || m < 1 || T < 1) fail(ErrorKind::DimensionMismatch, "trajectory data is empty");
  if (data.U0.cols() != T || data.X1.rows() != n || data.X1.cols() != T)
    fail(ErrorKind::DimensionMismatch, "X0, U0, X1 must share the horizon T and the state dimension");
  weights.validate(n, m);
}

// Basis of {vec(Y) : X0 Y symmetric}; vec is column-major (Y(t, l) at l*T + t).
Matrix symmetric_basis(const Matrix& X0) {
  const auto n = static_cast<int>(X0.rows());
  const auto T = static_cast<int>(X0.cols());
  const int dim = n * T;
  const int q = n * (n - 1) / 2;
  if (q == 0) return Matrix::Identity(dim, dim);

  Matrix C = Matrix::Zero(q, dim);
  int row = 0;
  for (int l = 1; l < n; ++l)
    for (int k = 0; k < l; ++k, ++row) {
      C.row(row).segment(l * T, T) += X0.row(k);
      C.row(row).segment(k * T, T) -= X0.row(l);
    }
  Eigen::ColPivHouseholderQR<Matrix> qr(C);
  if (qr.rank() < q) fail(ErrorKind::RankDeficient, "X0 Y symmetry conditions are linearly dependent (degenerate X0)");

  std::vector<bool> is_pivot(dim, false);
  std::vector<int> pivots;
  for (int i = 0; i < q; ++i) {
    const int idx = qr.colsPermutation().indices()(i);
    is_pivot[idx] = true;
    pivots.push_back(idx);
  }
  std::vector<int> free;
  for (int i = 0; i < dim; ++i)
    if (!is_pivot[i]) free.push_back(i);

  Matrix Cp(q, q), Cf(q, static_cast<Eigen::Index>(free.size()));
  for (int i = 0; i < q; ++i) Cp.col(i) = C.col(pivots[i]);
  for (std::size_t i = 0; i < free.size(); ++i) Cf.col(static_cast<Eigen::Index>(i)) = C.col(free[i]);
  const Matrix coupling = -Cp.fullPivLu().solve(Cf);

  Matrix N = Matrix::Zero(dim, static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) N(free[i], static_cast<Eigen::Index>(i)) = 1.0;
  for (int i = 0; i < q; ++i) N.row(pivots[i]) = coupling.row(i);
  return N;
}

class Builder {
 public:
  Builder(const TrajectoryData& data, const LqrWeights& weights, DddProblem& out) : data_(data), out_(out) {
    n_ = static_cast<int>(data.X0.rows());
    m_ = static_cast<int>(data.U0.rows());
    T_ = static_cast<int>(data.X0.cols());
    out.n = n_;
    out.m = m_;
    out.T = T_;
    out.underdetermined = T_ < 2 * n_ + m_;
    out.y_basis = symmetric_basis(data.X0);
    out.y_free = static_cast<int>(out.y_basis.cols());
    out.x_offset = out.y_free;
    out.slack_offset = out.x_offset + m_ * (m_ + 1) / 2;
    sqrtR_U0_ = sqrt_spd(weights.R, 0.0) * data.U0;
    QX0_ = weights.Q * data.X0;
  }

  int x_var(int r, int c) const {  // r <= c
    return out_.x_offset + c * (c + 1) / 2 + r;
  }

  // Adds value * (M Y)(i, l) where M is a row-block of data with T columns.
  void add_product(LmiBlock& b, int row, int col, const Eigen::Ref<const Eigen::RowVectorXd>& mrow, int l,
                   double scale = 1.0) const {
    const Vector coef = out_.y_basis.middleRows(static_cast<Eigen::Index>(l) * T_, T_).transpose() * mrow.transpose();
    for (Eigen::Index v = 0; v < coef.size(); ++v)
      if (coef(v) != 0.0) b.add(static_cast<int>(v), row, col, scale * coef(v));
  }

  // Adds Y(t, l).
  void add_entry(LmiBlock& b, int row, int col, int t, int l) const {
    const auto r = out_.y_basis.row(static_cast<Eigen::Index>(l) * T_ + t);
    for (Eigen::Index v = 0; v < r.size(); ++v)
      if (r(v) != 0.0) b.add(static_cast<int>(v), row, col, r(v));
  }

  // Upper triangle of X0 Y placed at (offset, offset); symmetric part of the product.
  void add_x0y(LmiBlock& b, int offset) const {
    for (int l = 0; l < n_; ++l)
      for (int k = 0; k <= l; ++k) {
        if (k == l) {
          add_product(b, offset + k, offset + l, data_.X0.row(k), l);
        } else {
          add_product(b, offset + k, offset + l, data_.X0.row(k), l, 0.5);
          add_product(b, offset + k, offset + l, data_.X0.row(l), k, 0.5);
        }
      }
  }

  void build_ce_part(int num_vars) {
    LmiProblem& lmi = out_.lmi;
    lmi.num_vars = num_vars;
    lmi.objective = Vector::Zero(num_vars);
    for (int l = 0; l < n_; ++l)
      lmi.objective.head(out_.y_free) +=
          out_.y_basis.middleRows(static_cast<Eigen::Index>(l) * T_, T_).transpose() * QX0_.row(l).transpose();
    for (int i = 0; i < m_; ++i) lmi.objective(x_var(i, i)) += 1.0;

    LmiBlock b1;
    b1.size = 2 * n_;
    add_x0y(b1, 0);
    for (int k = 0; k < n_; ++k) b1.add(-1, k, k, -1.0);
    for (int k = 0; k < n_; ++k)
      for (int l = 0; l < n_; ++l) add_product(b1, k, n_ + l, data_.X1.row(k), l);
    add_x0y(b1, n_);
    lmi.blocks.push_back(std::move(b1));

    LmiBlock b2;
    b2.size = m_ + n_;
    for (int c = 0; c < m_; ++c)
      for (int r = 0; r <= c; ++r) b2.add(x_var(r, c), r, c, 1.0);
    for (int i = 0; i < m_; ++i)
      for (int l = 0; l < n_; ++l) add_product(b2, i, m_ + l, sqrtR_U0_.row(i), l);
    add_x0y(b2, m_);
    lmi.blocks.push_back(std::move(b2));
  }

  void build_full_slack(double eta) {
    LmiProblem& lmi = out_.lmi;
    auto s_var = [&](int r, int c) { return out_.slack_offset + c * (c + 1) / 2 + r; };
    for (int i = 0; i < T_; ++i) lmi.objective(s_var(i, i)) += eta;
    LmiBlock b;
    b.size = T_ + n_;
    for (int c = 0; c < T_; ++c)
      for (int r = 0; r <= c; ++r) b.add(s_var(r, c), r, c, 1.0);
    for (int t = 0; t < T_; ++t)
      for (int l = 0; l < n_; ++l) add_entry(b, t, T_ + l, t, l);
    add_x0y(b, T_);
    lmi.blocks.push_back(std::move(b));
  }

  void build_epigraph_slack(double eta) {
    LmiProblem& lmi = out_.lmi;
    LmiBlock x0y;
    x0y.size = n_ + 1;
    add_x0y(x0y, 1);
    for (int t = 0; t < T_; ++t) {
      const int tv = out_.slack_offset + t;
      lmi.objective(tv) += eta;
      LmiBlock b = x0y;
      b.add(tv, 0, 0, 1.0);
      for (int l = 0; l < n_; ++l) add_entry(b, 0, 1 + l, t, l);
      lmi.blocks.push_back(std::move(b));
    }
  }

 private:
  const TrajectoryData& data_;
  DddProblem& out_;
  int n_ = 0;
  int m_ = 0;
  int T_ = 0;
  Matrix sqrtR_U0_;
  Matrix QX0_;
};

Matrix x0y_of(const TrajectoryData& data, const Matrix& Y) { return data.X0 * Y; }

void check_Y(const TrajectoryData& data, const Matrix& Y) {
  if (Y.rows() != data.X0.cols() || Y.cols() != data.X0.rows())
    fail(ErrorKind::DimensionMismatch, "Y must be T x n");
}

// tr(M P^{-1} M') for symmetric positive definite P.
double weighted_trace(const Matrix& M, const Matrix& P) {
  Eigen::LLT<Matrix> llt(symmetrize(P));
  if (llt.info() != Eigen::Success) fail(ErrorKind::InvalidArgument, "X0 Y is not positive definite");
  const Matrix L_inv_Mt = llt.matrixL().solve(M.transpose());
  return L_inv_Mt.squaredNorm();
}

}  // namespace

Matrix DddProblem::unpack_Y(const Vector& z) const {
  const Vector y = y_basis * z.head(y_free);
  return Eigen::Map<const Matrix>(y.data(), T, n);
}

Matrix DddProblem::unpack_X(const Vector& z) const {
  Matrix X(m, m);
  for (int c = 0; c < m; ++c)
    for (int r = 0; r <= c; ++r) X(r, c) = X(c, r) = z(x_offset + c * (c + 1) / 2 + r);
  return X;
}

Matrix DddProblem::unpack_slack(const Vector& z) const {
  if (kind == SdpKind::CertaintyEquivalence) return Matrix();
  if (form == RpForm::Epigraph) return z.segment(slack_offset, T);
  Matrix S(T, T);
  for (int c = 0; c < T; ++c)
    for (int r = 0; r <= c; ++r) S(r, c) = S(c, r) = z(slack_offset + c * (c + 1) / 2 + r);
  return S;
}

DddProblem build_ce(const TrajectoryData& data, const LqrWeights& weights) {
  check_data(data, weights);
  DddProblem out;
  out.kind = SdpKind::CertaintyEquivalence;
  Builder builder(data, weights, out);
  builder.build_ce_part(out.slack_offset);
  return out;
}

DddProblem build_rp(const TrajectoryData& data, const LqrWeights& weights, double eta, RpForm form) {
  check_data(data, weights);
  if (!(eta > 0.0) || !std::isfinite(eta)) fail(ErrorKind::InvalidArgument, "eta must be positive");
  DddProblem out;
  out.kind = SdpKind::RobustnessPromoting;
  out.form = form;
  out.eta = eta;
  Builder builder(data, weights, out);
  const int T = out.T;
  const int slack_vars = form == RpForm::Full ? T * (T + 1) / 2 : T;
  builder.build_ce_part(out.slack_offset + slack_vars);
  if (form == RpForm::Full) builder.build_full_slack(eta);
  else builder.build_epigraph_slack(eta);
  return out;
}

DddDiagnostics diagnostics(const TrajectoryData& data, const Matrix& Y) {
  check_Y(data, Y);
  const Matrix P = x0y_of(data, Y);
  DddDiagnostics d;
  d.norm_X0Y = sigma_max(P);
  d.norm_X0Y_minus_I = sigma_max(P - Matrix::Identity(P.rows(), P.cols()));
  d.norm_U0Y = sigma_max(data.U0 * Y);
  d.norm_X1Y = sigma_max(data.X1 * Y);
  d.sigma_min_X0Y = sigma_min(P);
  return d;
}

Matrix recover_gain(const Matrix& U0, const Matrix& X0, const Matrix& Y, double cond_tol) {
  if (X0.cols() != Y.rows() || U0.cols() != Y.rows() || Y.cols() != X0.rows())
    fail(ErrorKind::DimensionMismatch, "recover_gain: X0 Y must be square n x n");
  const Matrix P = X0 * Y;
  const Vector sv = singular_values(P);
  const double tol = cond_tol < 0.0 ? 1e-8 * sv(0) : cond_tol;
  if (!(sv(sv.size() - 1) >= tol) || sv(0) == 0.0)
    fail(ErrorKind::Singular, "X0 Y is singular (sigma_min = " + std::to_string(sv(sv.size() - 1)) +
                                  "); degenerate SDP solution");
  // K P = -U0 Y  <=>  P' K' = -(U0 Y)'.
  return P.transpose().fullPivLu().solve(-(U0 * Y).transpose()).transpose();
}

double reduced_objective_ce(const TrajectoryData& data, const LqrWeights& weights, const Matrix& Y) {
  check_data(data, weights);
  check_Y(data, Y);
  const Matrix P = x0y_of(data, Y);
  const Matrix M = sqrt_spd(weights.R, 0.0) * data.U0 * Y;
  return (weights.Q * P).trace() + weighted_trace(M, P);
}

double reduced_objective_rp(const TrajectoryData& data, const LqrWeights& weights, double eta, const Matrix& Y) {
  const double ce = reduced_objective_ce(data, weights, Y);
  return ce + eta * weighted_trace(Y, x0y_of(data, Y));
}

DddSolution solve_problem(const DddProblem& problem, const TrajectoryData& data, const SolverSettings& settings) {
  DddSolution sol;
  sol.kind = problem.kind;
  sol.form = problem.form;
  sol.eta = problem.eta;
  sol.solver = solve(problem.lmi, settings);
  const Vector& z = sol.solver.z;
  sol.objective = sol.solver.objective_value;
  if (z.size() != problem.lmi.num_vars) return sol;
  sol.Y = problem.unpack_Y(z);
  sol.X = problem.unpack_X(z);
  sol.slack = problem.unpack_slack(z);
  sol.diagnostics = diagnostics(data, sol.Y);
  try {
    sol.K = recover_gain(data.U0, data.X0, sol.Y);
    sol.gain_recovered = true;
  } catch (const Error& e) {
    sol.gain_error = e.what();
  }
  return sol;
}

DddSolution solve_ce(const TrajectoryData& data, const LqrWeights& weights, const SolverSettings& settings) {
  return solve_problem(build_ce(data, weights), data, settings);
}

DddSolution solve_rp(const TrajectoryData& data, const LqrWeights& weights, double eta, RpForm form,
                     const SolverSettings& settings) {
  return solve_problem(build_rp(data, weights, eta, form), data, settings);
}

std::vector<double> verify_feasibility(const TrajectoryData& data, const LqrWeights& weights,
                                       const DddSolution& solution) {
  check_data(data, weights);
  check_Y(data, solution.Y);
  const auto n = data.X0.rows();
  const auto m = data.U0.rows();
  const auto T = data.X0.cols();
  const Matrix P = symmetrize(data.X0 * solution.Y);
  const Matrix X1Y = data.X1 * solution.Y;
  const Matrix RU = sqrt_spd(weights.R, 0.0) * data.U0 * solution.Y;
  if (solution.X.rows() != m || solution.X.cols() != m) fail(ErrorKind::DimensionMismatch, "X must be m x m");

  std::vector<double> out;
  Matrix b1(2 * n, 2 * n);
  b1 << P - Matrix::Identity(n, n), X1Y, X1Y.transpose(), P;
  out.push_back(lambda_min_sym(b1));
  Matrix b2(m + n, m + n);
  b2 << symmetrize(solution.X), RU, RU.transpose(), P;
  out.push_back(lambda_min_sym(b2));

  if (solution.kind == SdpKind::RobustnessPromoting) {
    if (solution.form == RpForm::Full) {
      if (solution.slack.rows() != T || solution.slack.cols() != T) fail(ErrorKind::DimensionMismatch, "S must be T x T");
      Matrix b(T + n, T + n);
      b << symmetrize(solution.slack), solution.Y, solution.Y.transpose(), P;
      out.push_back(lambda_min_sym(b));
    } else {
      if (solution.slack.size() != T) fail(ErrorKind::DimensionMismatch, "t must have T entries");
      for (Eigen::Index t = 0; t < T; ++t) {
        Matrix b(n + 1, n + 1);
        b << solution.slack(t), solution.Y.row(t), solution.Y.row(t).transpose(), P;
        out.push_back(lambda_min_sym(b));
      }
    }
  }
  return out;
}

}  // namespace ddd
