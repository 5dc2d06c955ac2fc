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

#include <doctest.h>

#include <cmath>
#include <limits>

#include "ddd/analytic_oracle.hpp"
#include "ddd/ddd_sdp.hpp"
#include "ddd/error.hpp"
#include "ddd/excitation.hpp"
#include "ddd/lqr_exact.hpp"
#include "test_util.hpp"

using namespace ddd;
using ddd::testing::max_abs;
using ddd::testing::paper_plant;
using ddd::testing::random_matrix;
using ddd::testing::random_plant;

TEST_CASE("minimum-norm solution on the identity system") {
  const Matrix E = e_matrix(1, 1);
  CHECK(max_abs(min_norm_solution(Matrix::Identity(3, 3), E) - E) < 1e-15);
}

TEST_CASE("minimum-norm solution agrees with an orthogonal factorization") {
  NormalStream rng(3);
  for (int k = 0; k < 20; ++k) {
    const int n = 1 + k % 2, m = 1 + (k / 2) % 2;
    const Matrix D = random_matrix(rng, 2 * n + m, 12);
    const Matrix E = e_matrix(n, m);
    const Matrix Y = min_norm_solution(D, E);
    CHECK((D * Y - E).norm() <= 1e-10);
    const Matrix ref = D.completeOrthogonalDecomposition().solve(E);
    CHECK(max_abs(Y - ref) <= 1e-9);
    // Orthogonal to the null space of D.
    Eigen::JacobiSVD<Matrix> svd(D, Eigen::ComputeFullV);
    const Matrix N = svd.matrixV().rightCols(12 - (2 * n + m));
    CHECK(max_abs(N.transpose() * Y) <= 1e-10);
  }
  CHECK_THROWS_AS(min_norm_solution(Matrix::Ones(3, 5), e_matrix(1, 1)), Error);
}

TEST_CASE("CE prediction paths") {
  const auto noisy = paper_plant(1.0);
  auto d = simulate(noisy.system, 50, 1);
  auto pred = ce_prediction(d, noisy.weights);
  CHECK(pred.path == CePath::ZeroGain);
  CHECK(max_abs(pred.K) == 0.0);
  CHECK(pred.rank_DT == 5);

  const auto clean = paper_plant(0.0);
  d = simulate(clean.system, 50, 1);
  pred = ce_prediction(d, clean.weights);
  CHECK(pred.path == CePath::ModelBased);
  const Matrix K_lqr = solve_dare(clean.system, clean.weights).K;
  CHECK(max_abs(pred.K - K_lqr) <= 1e-6);
  CHECK(max_abs(pred.A_hat - clean.system.A) <= 1e-9);
  const auto sol = solve_ce(d, clean.weights);
  REQUIRE(sol.gain_recovered);
  CHECK(max_abs(sol.K - pred.K) <= 1e-3);

  LtiSystem zero;
  zero.A = Matrix::Zero(1, 1);
  zero.B = Matrix::Ones(1, 1);
  const LqrWeights w{Matrix::Ones(1, 1), Matrix::Ones(1, 1)};
  d = simulate(zero, 10, 2);
  CHECK(max_abs(ce_prediction(d, w).K) < 1e-12);
  const auto z = solve_ce(d, w);
  REQUIRE(z.gain_recovered);
  CHECK(max_abs(z.K) < 1e-4);
}

TEST_CASE("psi matrix") {
  const auto clean = paper_plant(0.0);
  auto d = simulate(clean.system, 20, 1);
  NormalStream rng(2);
  Matrix Y = random_matrix(rng, 20, 2);
  auto rep = psi_matrix(d, Y);
  CHECK(max_abs(rep.Psi) == 0.0);

  // Y = Y_n S makes X0 Y = S symmetric, as at any feasible point.
  const auto noisy = paper_plant(0.3);
  d = simulate(noisy.system, 20, 1);
  const Matrix G = random_matrix(rng, 2, 2);
  const Matrix S = G * G.transpose() + Matrix::Identity(2, 2);
  Y = min_norm_solution(combined_matrix(d), e_matrix(2, 1)) * S;
  rep = psi_matrix(d, Y);
  CHECK(max_abs(rep.Psi - rep.Psi.transpose()) <= 1e-10);
  CHECK(max_abs(rep.M - Y * (d.X0 * Y).inverse() * Y.transpose()) <= 1e-8);
  CHECK_THROWS_AS(psi_matrix(d, Matrix::Zero(20, 2)), Error);
}

TEST_CASE("psi equals A A' at the noisy CE optimum") {
  const auto p = paper_plant(std::sqrt(1e-5));
  const auto d = simulate(p.system, 50, 3);
  const auto sol = solve_ce(d, p.weights);
  REQUIRE(sol.solver.status == SolveStatus::Optimal);
  const auto rep = psi_matrix(d, sol.Y);
  const Matrix AAt = p.system.A * p.system.A.transpose();
  CHECK((rep.Psi - AAt).norm() <= 1e-4);
  CHECK(max_abs(d.W0 * sol.Y + p.system.A) <= 1e-4);
  const auto l1 = lemma1_condition(rep.Psi);
  CHECK_FALSE(l1.satisfiable);
  CHECK(l1.lambda_max >= std::pow(spectral_radius(p.system.A), 2) - 1e-6);
}

TEST_CASE("stabilization condition on psi") {
  auto r = lemma1_condition(Matrix::Zero(2, 2));
  CHECK(r.satisfiable);
  r = lemma1_condition(Matrix::Identity(2, 2));
  CHECK_FALSE(r.satisfiable);
  CHECK(r.borderline);
  const Matrix A = paper41().A;
  r = lemma1_condition(A * A.transpose());
  CHECK_FALSE(r.satisfiable);
  CHECK(r.lambda_max > 1.02);
}

TEST_CASE("data-dependent RP gain bound") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 50, 4);
  double prev = 0.0;
  for (double eta : {0.1, 1.0, 10.0, 100.0}) {
    const double b = rp_gain_bound(d, p.weights, eta);
    CHECK(b > prev);
    prev = b;
  }
  // Independent evaluation of the bound formula.
  const Matrix D = combined_matrix(d);
  const double s = Eigen::SelfAdjointEigenSolver<Matrix>(D * D.transpose()).eigenvalues()(0);
  const double a = 1.0 * 5.0;
  CHECK(rp_gain_bound(d, p.weights, 1.0) == doctest::Approx(a / s * (2.0 + a / s)).epsilon(1e-9));
  CHECK_THROWS_AS(rp_gain_bound(simulate(paper_plant(0.0).system, 50, 4), p.weights, 1.0), Error);
}

TEST_CASE("RP gain bound holds per run and shrinks with the horizon") {
  const auto p = paper_plant(1.0);
  double first = 0.0, last = 0.0;
  for (int T : {25, 50, 100, 200}) {
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
      const auto d = simulate(p.system, T, seed);
      const auto sol = solve_rp(d, p.weights, 1.0);
      REQUIRE(sol.solver.status == SolveStatus::Optimal);
      const double nk = sigma_max(sol.K);
      const double bound = rp_gain_bound(d, p.weights, 1.0);
      CHECK(nk * nk <= bound);
      if (seed == 1 && T == 25) first = bound;
      if (seed == 1 && T == 200) last = bound;
    }
  }
  CHECK(last < first);
}

TEST_CASE("theoretical RP bound") {
  const auto p = paper_plant(1.0);
  const auto a = rp_bound_theoretical(100000002, 1.0, p.weights, p.system, 0.5);
  const auto b = rp_bound_theoretical(200000002, 1.0, p.weights, p.system, 0.5);
  CHECK(b.C == a.C);
  CHECK(b.bound / a.bound == doctest::Approx(0.5).epsilon(0.01));
  CHECK(rp_bound_theoretical(100, 3.0, p.weights, p.system, 0.5).C == doctest::Approx(3.0 * a.C));
  CHECK_THROWS_AS(rp_bound_theoretical(2, 1.0, p.weights, p.system, 0.5), Error);
  // Independent transcription of C.
  const double sp = sigma_min(p2_matrix(p.system));
  CHECK(a.C == doctest::Approx(2.0 * 3 * 5 / (sp * sp * 0.25)));
}

TEST_CASE("theoretical bound with empirical rho dominates the measured gain") {
  const auto p = paper_plant(1.0);
  const int T = 200;
  int hits = 0;
  const int runs = 5;
  for (std::uint64_t seed = 1; seed <= runs; ++seed) {
    const auto d = simulate(p.system, T, seed);
    const double rho = empirical_rho(d.X0, stacked_input(d, p.system, InputScaling::Isotropic));
    const auto sol = solve_rp(d, p.weights, 1.0);
    REQUIRE(sol.solver.status == SolveStatus::Optimal);
    const double nk = sigma_max(sol.K);
    if (nk * nk <= rp_bound_theoretical(T, 1.0, p.weights, p.system, rho).bound) ++hits;
  }
  CHECK(hits >= runs * 9 / 10);
}

TEST_CASE("CE objective reference") {
  CHECK(ce_objective_reference(paper_weights()) == 2.0);
  const LqrWeights w{Eigen::Vector3d(1, 2, 3).asDiagonal().toDenseMatrix(), Matrix::Ones(1, 1)};
  CHECK(ce_objective_reference(w) == 6.0);
  const auto p = paper_plant(0.5);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto sol = solve_ce(simulate(p.system, 20, seed), p.weights);
    REQUIRE(sol.solver.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.objective - 2.0) <= 1e-6);
  }
}

TEST_CASE("minimum-norm solution is CE feasible and optimal on random systems") {
  for (std::uint64_t k = 0; k < 20; ++k) {
    const int n = 1 + static_cast<int>(k % 2), m = 1 + static_cast<int>((k / 2) % 2);
    const auto p = random_plant(100 + k, n, m, 0.5);
    const int T = (m + n) * (n + 1) + n + 4;
    const auto d = simulate(p.system, T, 100 + k);
    DddSolution cand;
    cand.Y = min_norm_solution(combined_matrix(d), e_matrix(n, m));
    cand.X = Matrix::Zero(m, m);
    for (double e : verify_feasibility(d, p.weights, cand)) CHECK(e >= -1e-10);
    CHECK(std::abs(reduced_objective_ce(d, p.weights, cand.Y) - p.weights.Q.trace()) <= 1e-10);
    const auto sol = solve_ce(d, p.weights);
    REQUIRE(sol.solver.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.objective - p.weights.Q.trace()) <= 1e-6);
  }
}

TEST_CASE("oracle report") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 30, 2);
  const auto sol = solve_ce(d, p.weights);
  const auto r = oracle_report(d, p.weights, p.system, 1.0, sol.Y, 0.5);
  CHECK(r.rank_DT == 5);
  CHECK(r.rank_DT <= std::min(5, d.T));
  CHECK(r.rp_bound >= 0.0);
  CHECK(r.Y_n.rows() == 30);
  CHECK(std::isfinite(r.rp_bound_theoretical));
  CHECK(r.psi_gap == doctest::Approx((r.psi - p.system.A * p.system.A.transpose()).norm()));
  const auto clean = oracle_report(simulate(paper_plant(0.0).system, 30, 2), p.weights, paper41(), 1.0, Matrix(), 0.0);
  CHECK(clean.rp_bound == std::numeric_limits<double>::infinity());
  CHECK(clean.Y_n.size() == 0);
  CHECK(std::isnan(clean.rp_bound_theoretical));
}
