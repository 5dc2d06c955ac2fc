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

#include "ddd/conic_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <string>

#include "ddd/error.hpp"
#include "json_util.hpp"

namespace ddd {

void LmiBlock::add(int var, int row, int col, double value) {
  if (row > col) std::swap(row, col);
  entries.push_back({var, row, col, value});
}

void LmiProblem::validate() const {
  if (num_vars < 0) fail(ErrorKind::InvalidArgument, "num_vars must be nonnegative");
  if (objective.size() != num_vars) fail(ErrorKind::InvalidArgument, "objective length must equal num_vars");
  if (!objective.allFinite()) fail(ErrorKind::InvalidArgument, "objective has non-finite entries");
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& b = blocks[j];
    if (b.size < 1) fail(ErrorKind::InvalidArgument, "block " + std::to_string(j) + ": size must be >= 1");
    for (const auto& e : b.entries) {
      if (e.var < -1 || e.var >= num_vars)
        fail(ErrorKind::InvalidArgument, "block " + std::to_string(j) + ": variable index out of range");
      if (e.row < 0 || e.col < 0 || e.row >= b.size || e.col >= b.size)
        fail(ErrorKind::InvalidArgument, "block " + std::to_string(j) + ": entry outside the block");
      if (e.row > e.col)
        fail(ErrorKind::InvalidArgument, "block " + std::to_string(j) + ": entries must lie in the upper triangle");
      if (!std::isfinite(e.value)) fail(ErrorKind::InvalidArgument, "block " + std::to_string(j) + ": non-finite entry");
    }
  }
}

Matrix LmiProblem::evaluate_block(std::size_t j, const Vector& z) const {
  const auto& b = blocks.at(j);
  Matrix F = Matrix::Zero(b.size, b.size);
  for (const auto& e : b.entries) {
    const double v = e.var < 0 ? e.value : e.value * z(e.var);
    F(e.row, e.col) += v;
    if (e.row != e.col) F(e.col, e.row) += v;
  }
  return F;
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::PrimalInfeasible:
      return "PrimalInfeasible";
    case SolveStatus::DualInfeasible:
      return "DualInfeasible";
    case SolveStatus::NumericalTrouble:
      return "NumericalTrouble";
    case SolveStatus::IterLimit:
      return "IterLimit";
  }
  return "Unknown";
}

std::vector<double> block_min_eigenvalues(const LmiProblem& problem, const Vector& z) {
  std::vector<double> out;
  out.reserve(problem.blocks.size());
  for (std::size_t j = 0; j < problem.blocks.size(); ++j) out.push_back(lambda_min_sym(problem.evaluate_block(j, z)));
  return out;
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kStepFraction = 0.99;

struct BlockLayout {
  int size = 0;
  int offset = 0;
  int len = 0;
};

inline int svec_index(int row, int col) { return col * (col + 1) / 2 + row; }  // row <= col

Matrix smat(const Vector& v, const BlockLayout& b) {
  Matrix M(b.size, b.size);
  for (int c = 0; c < b.size; ++c) {
    for (int r = 0; r < c; ++r) M(r, c) = M(c, r) = v(b.offset + svec_index(r, c)) / kSqrt2;
    M(c, c) = v(b.offset + svec_index(c, c));
  }
  return M;
}

void svec_into(const Matrix& M, Vector& v, const BlockLayout& b) {
  for (int c = 0; c < b.size; ++c) {
    for (int r = 0; r < c; ++r) v(b.offset + svec_index(r, c)) = kSqrt2 * 0.5 * (M(r, c) + M(c, r));
    v(b.offset + svec_index(c, c)) = M(c, c);
  }
}

// Largest alpha with I + alpha * D >= 0 for D already expressed in the scaled frame.
double max_step_scaled(const Matrix& D) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(D), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
}

// Nesterov-Todd scaling point of one block: R' Z R = R^{-1} S R^{-T} = diag(lambda).
struct NtScaling {
  Matrix R;
  Matrix Rinv;
  Vector lambda;
};

std::optional<NtScaling> nt_scaling(const Matrix& S, const Matrix& Z) {
  Eigen::LLT<Matrix> ls(symmetrize(S));
  Eigen::LLT<Matrix> lz(symmetrize(Z));
  if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return std::nullopt;
  const Matrix Ls = ls.matrixL();
  const Matrix Lz = lz.matrixL();
  Eigen::JacobiSVD<Matrix> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& sv = svd.singularValues();
  if (sv.minCoeff() <= 0.0 || !sv.allFinite()) return std::nullopt;
  NtScaling out;
  out.lambda = sv;
  out.R = Ls * svd.matrixV() * sv.cwiseSqrt().cwiseInverse().asDiagonal();
  out.Rinv = sv.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
             Ls.triangularView<Eigen::Lower>().solve(Matrix::Identity(S.rows(), S.rows()));
  return out;
}

class InteriorPoint {
 public:
  InteriorPoint(const Matrix& G, const Vector& h, const Vector& c, std::vector<BlockLayout> layout,
                const SolverSettings& settings)
      : G_(G), h_(h), c_(c), layout_(std::move(layout)), settings_(settings) {
    for (const auto& b : layout_) degree_ += b.size;
    scaling_.resize(layout_.size());
  }

  struct Outcome {
    SolveStatus status = SolveStatus::NumericalTrouble;
    Vector x;
    Vector z;
    double pcost = 0.0;
    double dcost = 0.0;
    double gap = 0.0;
    double pres = 0.0;
    double dres = 0.0;
    int iterations = 0;
  };

  template <typename FeasCheck>
  Outcome run(FeasCheck&& feasible) {
    Outcome out;
    if (!initialize()) return out;
    const double resx0 = std::max(1.0, c_.norm());
    const double resz0 = std::max(1.0, h_.norm());

    for (int iter = 0; iter <= settings_.max_iter; ++iter) {
      out.iterations = iter;
      const Vector rx = G_.transpose() * z_ + c_ * tau_;
      const Vector rz = G_ * x_ + s_ - h_ * tau_;
      const double cx = c_.dot(x_);
      const double hz = h_.dot(z_);
      const double rt = kappa_ + cx + hz;
      const double sz = s_.dot(z_);
      const double mu = (sz + tau_ * kappa_) / (degree_ + 1.0);

      out.pcost = cx / tau_;
      out.dcost = -hz / tau_;
      out.pres = rz.norm() / tau_ / resz0;
      out.dres = rx.norm() / tau_ / resx0;
      const double gap_abs = std::max(sz / (tau_ * tau_), std::abs(out.pcost - out.dcost));
      out.gap = gap_abs / std::max(1.0, std::abs(out.pcost));
      if (settings_.verbose)
        std::fprintf(stderr, "%3d pcost % .9e dcost % .9e gap %.2e pres %.2e dres %.2e tau %.2e kappa %.2e\n", iter,
                     out.pcost, out.dcost, out.gap, out.pres, out.dres, tau_, kappa_);

      if (out.pres <= settings_.feas_tol && out.dres <= settings_.feas_tol && out.gap <= settings_.gap_tol &&
          feasible(x_ / tau_)) {
        out.status = SolveStatus::Optimal;
        out.x = x_ / tau_;
        out.z = z_ / tau_;
        return out;
      }
      // Infeasibility certificates from the unnormalized iterate.
      if (hz < 0.0) {
        const double pinf = (G_.transpose() * z_).norm() / resx0 / (-hz);
        if (pinf <= settings_.feas_tol) {
          out.status = SolveStatus::PrimalInfeasible;
          out.x = Vector::Zero(x_.size());
          out.z = z_ / (-hz);
          return out;
        }
      }
      if (cx < 0.0) {
        const double dinf = (G_ * x_ + s_).norm() / resz0 / (-cx);
        if (dinf <= settings_.feas_tol) {
          out.status = SolveStatus::DualInfeasible;
          out.x = x_ / (-cx);
          out.z = Vector::Zero(z_.size());
          return out;
        }
      }
      if (iter == settings_.max_iter) break;
      if (!(mu > 0.0) || !std::isfinite(mu)) return fail_numerics(out);

      if (!factor()) return fail_numerics(out);
      // Solution of the KKT system for the (tau) column: rhs (-c, h).
      Vector x1, zt1;
      solve_kkt(-c_, h_, x1, zt1);
      const double tau_den = c_.dot(x1) + ht_.dot(zt1) - kappa_ / tau_;

      // Affine direction.
      std::vector<Matrix> ds(layout_.size());
      for (std::size_t j = 0; j < layout_.size(); ++j) ds[j] = -Matrix(scaling_[j].lambda.array().square().matrix().asDiagonal());
      double dkappa = -tau_ * kappa_;
      Direction aff;
      if (!direction(rx, rz, rt, ds, dkappa, x1, zt1, tau_den, aff)) return fail_numerics(out);
      const double step_aff = std::min(1.0, max_step(aff));
      const double sigma = std::pow(1.0 - step_aff, 3);

      // Combined predictor-corrector direction.
      for (std::size_t j = 0; j < layout_.size(); ++j) {
        const Matrix prod = aff.st[j] * aff.zt[j];
        ds[j] -= 0.5 * (prod + prod.transpose());
        ds[j].diagonal().array() += sigma * mu;
      }
      dkappa += -aff.dtau * aff.dkappa + sigma * mu;
      Direction dir;
      if (!direction(rx, rz, rt, ds, dkappa, x1, zt1, tau_den, dir)) return fail_numerics(out);
      const double alpha = std::min(1.0, kStepFraction * max_step(dir));
      if (!(alpha > 1e-12)) return fail_numerics(out);
      if (!take_step(dir, alpha)) return fail_numerics(out);
    }
    out.status = SolveStatus::IterLimit;
    out.x = x_ / tau_;
    out.z = z_ / tau_;
    return out;
  }

 private:
  struct Direction {
    Vector dx;
    std::vector<Matrix> st;  // scaled ds
    std::vector<Matrix> zt;  // scaled dz
    double dtau = 0.0;
    double dkappa = 0.0;
  };

  Outcome& fail_numerics(Outcome& out) {
    out.status = SolveStatus::NumericalTrouble;
    out.x = x_ / tau_;
    out.z = z_ / tau_;
    return out;
  }

  Matrix block(const Vector& v, std::size_t j) const { return smat(v, layout_[j]); }

  // Identity of the product cone in svec coordinates.
  Vector identity() const {
    Vector e = Vector::Zero(h_.size());
    for (const auto& b : layout_)
      for (int i = 0; i < b.size; ++i) e(b.offset + svec_index(i, i)) = 1.0;
    return e;
  }

  double cone_shift(const Vector& v) const {
    double t = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < layout_.size(); ++j) t = std::max(t, -lambda_min_sym(block(v, j)));
    return t;
  }

  bool initialize() {
    const Eigen::Index p = G_.cols();
    Eigen::LLT<Matrix> gram(G_.transpose() * G_);
    if (p > 0 && gram.info() != Eigen::Success) return false;
    if (p > 0) {
      x_ = gram.solve(G_.transpose() * h_);
      z_ = -G_ * gram.solve(c_);
    } else {
      x_ = Vector();
      z_ = Vector::Zero(h_.size());
    }
    s_ = h_ - G_ * x_;
    const Vector e = identity();
    const double ts = cone_shift(s_);
    if (ts >= -1e-8 * std::max(1.0, s_.norm())) s_ += (1.0 + ts) * e;
    const double tz = cone_shift(z_);
    if (tz >= -1e-8 * std::max(1.0, z_.norm())) z_ += (1.0 + tz) * e;
    tau_ = 1.0;
    kappa_ = 1.0;
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      auto sc = nt_scaling(block(s_, j), block(z_, j));
      if (!sc) return false;
      scaling_[j] = std::move(*sc);
    }
    return true;
  }

  // Scaled constraint matrix Gt = W^{-T} G and its factorization.
  bool factor() {
    const Eigen::Index p = G_.cols();
    Gt_.resize(G_.rows(), p);
    ht_.resize(h_.size());
    kron_.resize(layout_.size());
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      const auto& b = layout_[j];
      const Matrix& Ri = scaling_[j].Rinv;
      Matrix K(b.len, b.len);
      BlockLayout local{b.size, 0, b.len};
      Vector unit = Vector::Zero(b.len);
      Vector col(b.len);
      for (int l = 0; l < b.len; ++l) {
        unit.setZero();
        unit(l) = 1.0;
        svec_into(Ri * smat(unit, local) * Ri.transpose(), col, local);
        K.col(l) = col;
      }
      Gt_.middleRows(b.offset, b.len).noalias() = K * G_.middleRows(b.offset, b.len);
      ht_.segment(b.offset, b.len) = K * h_.segment(b.offset, b.len);
      kron_[j] = std::move(K);
    }
    // Gram matrix G~'G~ = R'R through a QR factorization so the solve does not square the conditioning.
    qr_.compute(Gt_);
    Rfac_ = qr_.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < p; ++i)
      if (!(std::abs(Rfac_(i, i)) > 0.0) || !std::isfinite(Rfac_(i, i))) return false;
    return true;
  }

  // ux = (G~'G~)^{-1} (bx + G~' t), ut = G~ ux - t.
  void solve_reduced(const Vector& bx, const Vector& t, Vector& ux, Vector& ut) const {
    const Eigen::Index p = G_.cols();
    Vector qt = qr_.householderQ().adjoint() * t;
    Vector y = Rfac_.transpose().triangularView<Eigen::Lower>().solve(bx);
    y += qt.head(p);
    ux = Rfac_.triangularView<Eigen::Upper>().solve(y);
    ut = Gt_ * ux - t;
  }

  // Solves [0 G'; G -W'W] [ux; uz] = [bx; bz]; returns ux and the scaled W uz.
  void solve_kkt(const Vector& bx, const Vector& bz, Vector& ux, Vector& uzt) const {
    Vector t(bz.size());
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      const auto& b = layout_[j];
      t.segment(b.offset, b.len) = kron_[j] * bz.segment(b.offset, b.len);
    }
    solve_reduced(bx, t, ux, uzt);
    // Iterative refinement with residuals of the unscaled system.
    for (int k = 0; k < 2; ++k) {
      Vector uz(bz.size()), wwuz(bz.size());
      for (std::size_t j = 0; j < layout_.size(); ++j) {
        const auto& sc = scaling_[j];
        const Matrix Zt = block(uzt, j);
        svec_into(sc.Rinv.transpose() * Zt * sc.Rinv, uz, layout_[j]);
        svec_into(sc.R * Zt * sc.R.transpose(), wwuz, layout_[j]);
      }
      const Vector r1 = bx - G_.transpose() * uz;
      const Vector r2 = bz - (G_ * ux - wwuz);
      Vector t2(bz.size());
      for (std::size_t j = 0; j < layout_.size(); ++j) {
        const auto& b = layout_[j];
        t2.segment(b.offset, b.len) = kron_[j] * r2.segment(b.offset, b.len);
      }
      Vector dx, dz;
      solve_reduced(r1, t2, dx, dz);
      ux += dx;
      uzt += dz;
    }
  }

  bool direction(const Vector& rx, const Vector& rz, const double rt, const std::vector<Matrix>& ds,
                 double dkappa, const Vector& x1, const Vector& zt1, double tau_den, Direction& dir) const {
    // lambda \ ds and W'(lambda \ ds) per block.
    std::vector<Matrix> ldiv(layout_.size());
    Vector wl(h_.size());
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      const Vector& lam = scaling_[j].lambda;
      Matrix q = ds[j];
      for (Eigen::Index r = 0; r < q.rows(); ++r)
        for (Eigen::Index c = 0; c < q.cols(); ++c) q(r, c) = 2.0 * ds[j](r, c) / (lam(r) + lam(c));
      svec_into(scaling_[j].R * q * scaling_[j].R.transpose(), wl, layout_[j]);
      ldiv[j] = std::move(q);
    }
    const Vector bx = -rx;
    const Vector bz = -rz - wl;
    Vector x2, zt2;
    solve_kkt(bx, bz, x2, zt2);
    if (!(std::abs(tau_den) > 0.0)) return false;
    const double dtau = (-rt - dkappa / tau_ - c_.dot(x2) - ht_.dot(zt2)) / tau_den;
    dir.dx = x2 + dtau * x1;
    const Vector zt = zt2 + dtau * zt1;
    dir.dtau = dtau;
    dir.dkappa = (dkappa - kappa_ * dtau) / tau_;
    dir.st.resize(layout_.size());
    dir.zt.resize(layout_.size());
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      dir.zt[j] = block(zt, j);
      dir.st[j] = ldiv[j] - dir.zt[j];
    }
    return dir.dx.allFinite() && std::isfinite(dir.dtau) && std::isfinite(dir.dkappa);
  }

  double max_step(const Direction& dir) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      const Vector isq = scaling_[j].lambda.cwiseSqrt().cwiseInverse();
      alpha = std::min(alpha, max_step_scaled(isq.asDiagonal() * dir.st[j] * isq.asDiagonal()));
      alpha = std::min(alpha, max_step_scaled(isq.asDiagonal() * dir.zt[j] * isq.asDiagonal()));
    }
    if (dir.dtau < 0.0) alpha = std::min(alpha, -tau_ / dir.dtau);
    if (dir.dkappa < 0.0) alpha = std::min(alpha, -kappa_ / dir.dkappa);
    return alpha;
  }

  bool take_step(const Direction& dir, double alpha) {
    x_ += alpha * dir.dx;
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
    for (std::size_t j = 0; j < layout_.size(); ++j) {
      auto& sc = scaling_[j];
      const auto& b = layout_[j];
      Vector tmp(b.len);
      BlockLayout local{b.size, 0, b.len};
      svec_into(sc.R * dir.st[j] * sc.R.transpose(), tmp, local);
      s_.segment(b.offset, b.len) += alpha * tmp;
      svec_into(sc.Rinv.transpose() * dir.zt[j] * sc.Rinv, tmp, local);
      z_.segment(b.offset, b.len) += alpha * tmp;

      // Update the scaling in the current scaled frame, then compose.
      Matrix S_new = alpha * dir.st[j];
      Matrix Z_new = alpha * dir.zt[j];
      S_new.diagonal() += sc.lambda;
      Z_new.diagonal() += sc.lambda;
      auto rel = nt_scaling(S_new, Z_new);
      if (!rel) return false;
      sc.R = sc.R * rel->R;
      sc.Rinv = rel->Rinv * sc.Rinv;
      sc.lambda = rel->lambda;
    }
    return x_.allFinite() && tau_ > 0.0 && kappa_ > 0.0;
  }

  const Matrix& G_;
  const Vector& h_;
  const Vector& c_;
  std::vector<BlockLayout> layout_;
  SolverSettings settings_;
  double degree_ = 0.0;

  Vector x_, s_, z_;
  double tau_ = 1.0;
  double kappa_ = 1.0;
  std::vector<NtScaling> scaling_;

  Matrix Gt_;
  Vector ht_;
  std::vector<Matrix> kron_;
  Eigen::HouseholderQR<Matrix> qr_;
  Matrix Rfac_;
};

}  // namespace

SolveResult solve(const LmiProblem& problem, const SolverSettings& settings) {
  problem.validate();
  const int p = problem.num_vars;

  std::vector<BlockLayout> layout;
  int rows = 0;
  for (const auto& b : problem.blocks) {
    const int len = b.size * (b.size + 1) / 2;
    layout.push_back({b.size, rows, len});
    rows += len;
  }

  // G x + s = h with s = svec(F(x)) stacked over blocks.
  Matrix G = Matrix::Zero(rows, p);
  Vector h = Vector::Zero(rows);
  for (std::size_t j = 0; j < problem.blocks.size(); ++j) {
    for (const auto& e : problem.blocks[j].entries) {
      const double scale = e.row == e.col ? 1.0 : kSqrt2;
      const int r = layout[j].offset + svec_index(e.row, e.col);
      if (e.var < 0) h(r) += scale * e.value;
      else G(r, e.var) -= scale * e.value;
    }
  }

  SolveResult result;
  result.z = Vector::Zero(p);

  auto finish_eigs = [&](const Vector& z) {
    const auto eigs = block_min_eigenvalues(problem, z);
    double worst = std::numeric_limits<double>::infinity();
    for (double v : eigs) worst = std::min(worst, v);
    return problem.blocks.empty() ? 0.0 : worst;
  };

  // Restrict to the row space of G; directions in its null space move no block.
  Matrix basis;
  bool reduced = false;
  if (p > 0) {
    // Pivoted QR detects the common full-rank case cheaply; otherwise the row
    // space comes from a Jacobi SVD of the triangular factor.
    Eigen::ColPivHouseholderQR<Matrix> qr(G);
    qr.setThreshold(100.0 * std::max(G.rows(), G.cols()) * std::numeric_limits<double>::epsilon());
    if (qr.rank() < p) {
      const Eigen::Index k = std::min<Eigen::Index>(G.rows(), p);
      const Matrix Rt = qr.matrixR().topRows(k).triangularView<Eigen::Upper>();
      const Matrix RPt = Rt * qr.colsPermutation().transpose();
      Eigen::JacobiSVD<Matrix> svd(RPt, Eigen::ComputeFullV);
      const Vector& sv = svd.singularValues();
      const double tol = sv(0) > 0.0 ? rank_tolerance(G, sv(0)) : 0.0;
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) ++rank;
      basis = svd.matrixV().leftCols(rank);
      const Vector c_perp = problem.objective - basis * (basis.transpose() * problem.objective);
      if (settings.verbose)
        std::fprintf(stderr, "reduced rank %ld of %d, |c_perp| %.3e\n", static_cast<long>(rank), p, c_perp.norm());
      if (c_perp.norm() > 1e-8 * std::max(1.0, problem.objective.norm())) {
        result.status = SolveStatus::DualInfeasible;
        result.z = c_perp / -c_perp.squaredNorm();
        result.objective_value = -std::numeric_limits<double>::infinity();
        return result;
      }
      reduced = true;
    }
  }

  const Matrix Gr = reduced ? Matrix(G * basis) : G;
  const Vector cr = reduced ? Vector(basis.transpose() * problem.objective) : problem.objective;
  auto lift = [&](const Vector& xr) -> Vector { return reduced ? Vector(basis * xr) : xr; };

  InteriorPoint ipm(Gr, h, cr, layout, settings);
  auto out = ipm.run([&](const Vector& xr) { return finish_eigs(lift(xr)) >= -settings.feas_tol; });

  result.status = out.status;
  result.iterations = out.iterations;
  result.z = out.x.size() ? lift(out.x) : Vector::Zero(p);
  result.objective_value = problem.objective.dot(result.z);
  result.dual_objective = out.dcost;
  result.gap = out.gap;
  result.primal_residual = out.pres;
  result.dual_residual = out.dres;
  result.feas = finish_eigs(result.z);
  if (out.z.size()) {
    for (std::size_t j = 0; j < layout.size(); ++j) result.dual_blocks.push_back(smat(out.z, layout[j]));
  }
  return result;
}

void write_problem_json(const LmiProblem& problem, std::ostream& out) {
  detail::json j;
  j["num_vars"] = problem.num_vars;
  j["c"] = std::vector<double>(problem.objective.data(), problem.objective.data() + problem.objective.size());
  detail::json blocks = detail::json::array();
  for (const auto& b : problem.blocks) {
    detail::json entries = detail::json::array();
    for (const auto& e : b.entries) entries.push_back({e.var, e.row, e.col, e.value});
    blocks.push_back({{"size", b.size}, {"entries", std::move(entries)}});
  }
  j["blocks"] = std::move(blocks);
  out << j.dump(1) << '\n';
}

void write_problem_json(const LmiProblem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  write_problem_json(problem, out);
}

LmiProblem read_problem_json(std::istream& in) {
  detail::json j;
  try {
    j = detail::json::parse(in);
  } catch (const detail::json::parse_error& e) {
    fail(ErrorKind::Io, std::string("problem JSON: ") + e.what());
  }
  LmiProblem problem;
  try {
    problem.num_vars = j.at("num_vars").get<int>();
    const auto c = j.at("c").get<std::vector<double>>();
    problem.objective = Eigen::Map<const Vector>(c.data(), static_cast<Eigen::Index>(c.size()));
    for (const auto& jb : j.at("blocks")) {
      LmiBlock b;
      b.size = jb.at("size").get<int>();
      for (const auto& e : jb.at("entries"))
        b.entries.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>(), e.at(3).get<double>()});
      problem.blocks.push_back(std::move(b));
    }
  } catch (const detail::json::exception& e) {
    fail(ErrorKind::Io, std::string("problem JSON: ") + e.what());
  }
  problem.validate();
  return problem;
}

LmiProblem read_problem_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  return read_problem_json(in);
}

}  // namespace ddd
