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

#include "ddd/analytic_oracle.hpp"
#include "ddd/ddd_sdp.hpp"
#include "ddd/error.hpp"
#include "ddd/lqr_exact.hpp"
#include "test_util.hpp"

using namespace ddd;
using ddd::testing::max_abs;
using ddd::testing::paper_plant;
using ddd::testing::random_matrix;
using ddd::testing::random_plant;

TEST_CASE("CE problem dimensions") {
  LtiSystem s;
  s.A = Matrix::Constant(1, 1, 0.5);
  s.B = Matrix::Ones(1, 1);
  s.sigma_w = 0.1;
  const auto d = simulate(s, 3, 1);
  const LqrWeights w{Matrix::Ones(1, 1), Matrix::Ones(1, 1)};
  const auto p = build_ce(d, w);
  CHECK(p.lmi.num_vars == 4);
  REQUIRE(p.lmi.blocks.size() == 2);
  CHECK(p.lmi.blocks[0].size == 2);
  CHECK(p.lmi.blocks[1].size == 2);
  CHECK_FALSE(p.underdetermined);
  CHECK(build_ce(simulate(s, 2, 1), w).underdetermined);
}

TEST_CASE("symmetry elimination parametrizes exactly the symmetric X0 Y") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 12, 3);
  const auto prob = build_ce(d, p.weights);
  const int n = 2, m = 1, T = 12;
  CHECK(prob.y_free == T * n - n * (n - 1) / 2);
  CHECK(prob.lmi.num_vars == prob.y_free + m * (m + 1) / 2);
  NormalStream rng(4);
  for (int k = 0; k < 5; ++k) {
    Vector z = random_matrix(rng, prob.lmi.num_vars, 1);
    const Matrix Y = prob.unpack_Y(z);
    const Matrix P = d.X0 * Y;
    CHECK(max_abs(P - P.transpose()) < 1e-10);
  }
}

TEST_CASE("RP problem layouts") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 10, 2);
  const auto full = build_rp(d, p.weights, 1.0, RpForm::Full);
  const auto epi = build_rp(d, p.weights, 1.0, RpForm::Epigraph);
  REQUIRE(full.lmi.blocks.size() == 3);
  CHECK(full.lmi.blocks[2].size == 10 + 2);
  REQUIRE(epi.lmi.blocks.size() == 2 + 10);
  for (std::size_t j = 2; j < epi.lmi.blocks.size(); ++j) CHECK(epi.lmi.blocks[j].size == 3);
  CHECK(full.lmi.num_vars - full.slack_offset == 10 * 11 / 2);
  CHECK(epi.lmi.num_vars - epi.slack_offset == 10);
  CHECK_THROWS_AS(build_rp(d, p.weights, 0.0), Error);
  CHECK_THROWS_AS(build_rp(d, p.weights, -1.0), Error);
}

TEST_CASE("noiseless CE recovers the Riccati gain") {
  const auto p = paper_plant(0.0);
  const Matrix K_lqr = solve_dare(p.system, p.weights).K;
  const auto d = simulate(p.system, 50, 1);
  const auto sol = solve_ce(d, p.weights);
  REQUIRE(sol.solver.status == SolveStatus::Optimal);
  REQUIRE(sol.gain_recovered);
  CHECK(max_abs(sol.K - K_lqr) <= 1e-3);
  const Matrix P = d.X0 * sol.Y;
  CHECK(spectral_radius(d.X1 * sol.Y * P.inverse()) < 1.0);
  CHECK(max_abs(sol.K * P + d.U0 * sol.Y) <= 1e-8);
}

TEST_CASE("noisy CE collapses to the zero gain") {
  const auto p = paper_plant(std::sqrt(1e-5));
  const auto d = simulate(p.system, 50, 2);
  const auto sol = solve_ce(d, p.weights);
  REQUIRE(sol.solver.status == SolveStatus::Optimal);
  REQUIRE(sol.gain_recovered);
  CHECK(max_abs(sol.K) <= 1e-4);
  CHECK(sol.diagnostics.norm_X0Y_minus_I <= 1e-6);
  CHECK(sol.diagnostics.norm_U0Y <= 1e-6);
  CHECK(sol.diagnostics.norm_X1Y <= 1e-6);
  CHECK(std::abs(sol.objective - 2.0) <= 1e-6);
}

TEST_CASE("noisy scalar CE optimum equals trace(Q)") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto p = random_plant(seed, 1, 1, 0.5);
    const auto d = simulate(p.system, 6, seed);
    const auto sol = solve_ce(d, p.weights);
    REQUIRE(sol.solver.status == SolveStatus::Optimal);
    CHECK(std::abs(sol.objective - ce_objective_reference(p.weights)) <= 1e-6);
  }
}

TEST_CASE("RP full and epigraph forms agree") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 20, 5);
  const auto a = solve_rp(d, p.weights, 1.0, RpForm::Full);
  const auto b = solve_rp(d, p.weights, 1.0, RpForm::Epigraph);
  REQUIRE(a.solver.status == SolveStatus::Optimal);
  REQUIRE(b.solver.status == SolveStatus::Optimal);
  CHECK(std::abs(a.objective - b.objective) <= 1e-6);
  CHECK(max_abs(a.K - b.K) <= 1e-4);
  // Trace-minimal S is Y (X0 Y)^{-1} Y'.
  const Matrix M = a.Y * (d.X0 * a.Y).inverse() * a.Y.transpose();
  CHECK(std::abs(a.slack.trace() - M.trace()) <= 1e-5);
  CHECK(std::abs(b.slack.sum() - (b.Y * (d.X0 * b.Y).inverse() * b.Y.transpose()).trace()) <= 1e-5);
}

TEST_CASE("gain recovery") {
  const Matrix X0 = Matrix::Identity(2, 2);
  const Matrix Y = Matrix::Identity(2, 2);
  CHECK(max_abs(recover_gain(Matrix::Zero(1, 2), X0, Y)) == 0.0);
  const Matrix M = (Matrix(1, 2) << 3, -4).finished();
  CHECK(max_abs(recover_gain(M / 2.0, X0, 2.0 * Y) + M / 2.0) < 1e-15);
  const Matrix singular = (Matrix(2, 2) << 1, 0, 0, 0).finished();
  CHECK_THROWS_AS(recover_gain(M, X0, singular), Error);
}

TEST_CASE("reduced objectives") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 10, 3);
  const Matrix Yn = min_norm_solution(combined_matrix(d), e_matrix(2, 1));
  CHECK(reduced_objective_ce(d, p.weights, Yn) == doctest::Approx(2.0).epsilon(1e-10));
  NormalStream rng(1);
  for (int k = 0; k < 5; ++k) {
    const Matrix Y = Yn + 0.05 * random_matrix(rng, 10, 2);
    const Matrix P = d.X0 * Y;
    if (lambda_min_sym(0.5 * (P + P.transpose())) <= 0.0) continue;
    const double gap = reduced_objective_rp(d, p.weights, 0.7, Y) - reduced_objective_ce(d, p.weights, Y);
    CHECK(gap >= 0.0);
    CHECK(reduced_objective_rp(d, p.weights, 1e-12, Y) ==
          doctest::Approx(reduced_objective_ce(d, p.weights, Y)).epsilon(1e-9));
  }
}

TEST_CASE("Schur complement is tight at the optimum") {
  const auto p = paper_plant(0.0);
  const auto d = simulate(p.system, 30, 7);
  const auto sol = solve_ce(d, p.weights);
  REQUIRE(sol.solver.status == SolveStatus::Optimal);
  const Matrix P = d.X0 * sol.Y;
  const Matrix V = d.U0 * sol.Y;  // sqrt(R) = 1
  CHECK(std::abs(sol.X.trace() - (V * P.inverse() * V.transpose()).trace()) <= 1e-6);
  CHECK(sol.objective == doctest::Approx(reduced_objective_ce(d, p.weights, sol.Y)).epsilon(1e-6));
}

TEST_CASE("independent feasibility verification") {
  const auto p = paper_plant(1.0);
  const auto d = simulate(p.system, 15, 4);
  DddSolution exact;
  exact.Y = min_norm_solution(combined_matrix(d), e_matrix(2, 1));
  exact.X = Matrix::Zero(1, 1);
  for (double e : verify_feasibility(d, p.weights, exact)) CHECK(e >= -1e-10);

  DddSolution zero;
  zero.Y = Matrix::Zero(15, 2);
  zero.X = Matrix::Zero(1, 1);
  CHECK(verify_feasibility(d, p.weights, zero)[0] == doctest::Approx(-1.0));

  const auto sol = solve_rp(d, p.weights, 1.0);
  REQUIRE(sol.solver.status == SolveStatus::Optimal);
  const auto eig = verify_feasibility(d, p.weights, sol);
  CHECK(eig.size() == 2 + 15);
  for (double e : eig) CHECK(e >= -1e-8);
}

TEST_CASE("RP gain respects the data-dependent bound") {
  const auto noisy = paper_plant(1.0);
  const auto sol = solve_rp(simulate(noisy.system, 100, 1), noisy.weights, 1.0);
  REQUIRE(sol.solver.status == SolveStatus::Optimal);
  const auto d = simulate(noisy.system, 100, 1);
  CHECK(sigma_max(sol.K) * sigma_max(sol.K) <= rp_gain_bound(d, noisy.weights, 1.0));
  CHECK(sol.diagnostics.norm_X0Y >= 1.0 - 1e-8);
}
