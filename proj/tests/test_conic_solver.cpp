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
#include <sstream>

#include "ddd/conic_solver.hpp"
#include "ddd/error.hpp"
#include "test_util.hpp"

using namespace ddd;
using ddd::testing::random_matrix;

namespace {

// minimize z s.t. [[z, 1], [1, z]] >= 0.
LmiProblem two_by_two() {
  LmiProblem p;
  p.num_vars = 1;
  p.objective = Vector::Ones(1);
  LmiBlock b;
  b.size = 2;
  b.add(0, 0, 0, 1.0);
  b.add(0, 1, 1, 1.0);
  b.add(-1, 0, 1, 1.0);
  p.blocks.push_back(b);
  return p;
}

LmiProblem scalar_bounds(double c1, double c2, double lower) {
  LmiProblem p;
  p.num_vars = 2;
  p.objective = Vector(2);
  p.objective << c1, c2;
  for (int i = 0; i < 2; ++i) {
    LmiBlock b;
    b.size = 1;
    b.add(i, 0, 0, 1.0);
    b.add(-1, 0, 0, -lower);
    p.blocks.push_back(b);
  }
  return p;
}

// minimize <C, X> s.t. X >= 0, tr(X) = 1 over 3x3 X parametrized by its upper
// triangle with X33 eliminated; optimum is lambda_min(C).
LmiProblem min_eigenvalue_problem(const Matrix& C) {
  const int n = static_cast<int>(C.rows());
  LmiProblem p;
  std::vector<std::pair<int, int>> vars;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r <= c; ++r)
      if (!(r == n - 1 && c == n - 1)) vars.emplace_back(r, c);
  p.num_vars = static_cast<int>(vars.size());
  p.objective = Vector::Zero(p.num_vars);
  LmiBlock b;
  b.size = n;
  b.add(-1, n - 1, n - 1, 1.0);
  for (int k = 0; k < p.num_vars; ++k) {
    const auto [r, c] = vars[k];
    b.add(k, r, c, 1.0);
    if (r == c) {
      b.add(k, n - 1, n - 1, -1.0);
      p.objective(k) = C(r, r) - C(n - 1, n - 1);
    } else {
      p.objective(k) = 2.0 * C(r, c);
    }
  }
  p.blocks.push_back(b);
  return p;
}

}  // namespace

TEST_CASE("two by two block") {
  const auto r = solve(two_by_two());
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.z(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.objective_value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.gap <= 1e-8);
  CHECK(r.feas >= -1e-8);
}

TEST_CASE("bound constraints") {
  const auto r = solve(scalar_bounds(1.0, 1.0, 1.0));
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.z(0) == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.z(1) == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("minimum eigenvalue as an SDP") {
  NormalStream rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix G = random_matrix(rng, 3, 3);
    const Matrix C = 0.5 * (G + G.transpose());
    const auto r = solve(min_eigenvalue_problem(C));
    REQUIRE(r.status == SolveStatus::Optimal);
    const double lmin = Eigen::SelfAdjointEigenSolver<Matrix>(C).eigenvalues()(0);
    // Objective omits the constant C33 from the eliminated trace constraint.
    CHECK(r.objective_value + C(2, 2) == doctest::Approx(lmin).epsilon(1e-6));
  }
}

TEST_CASE("infeasibility detection") {
  // z >= 1 and -z >= 0 cannot both hold.
  LmiProblem p;
  p.num_vars = 1;
  p.objective = Vector::Ones(1);
  LmiBlock a;
  a.size = 1;
  a.add(0, 0, 0, 1.0);
  a.add(-1, 0, 0, -1.0);
  LmiBlock b;
  b.size = 1;
  b.add(0, 0, 0, -1.0);
  p.blocks = {a, b};
  CHECK(solve(p).status == SolveStatus::PrimalInfeasible);

  // minimize -z s.t. z >= 0 is unbounded.
  CHECK(solve(scalar_bounds(-1.0, 1.0, 0.0)).status == SolveStatus::DualInfeasible);
}

TEST_CASE("weak duality and independent feasibility check") {
  NormalStream rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix G = random_matrix(rng, 3, 3);
    const auto p = min_eigenvalue_problem(0.5 * (G + G.transpose()));
    const auto r = solve(p);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective_value >= r.dual_objective - 1e-8 * (1.0 + std::abs(r.dual_objective)));
    const auto eig = block_min_eigenvalues(p, r.z);
    for (double e : eig) CHECK(e >= -1e-8);
    CHECK(r.feas == doctest::Approx(*std::min_element(eig.begin(), eig.end())));
    const Matrix F = p.evaluate_block(0, r.z);
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(F).eigenvalues()(0) == doctest::Approx(eig[0]));
  }
}

TEST_CASE("solves are deterministic") {
  NormalStream rng(12);
  const Matrix G = random_matrix(rng, 3, 3);
  const auto p = min_eigenvalue_problem(0.5 * (G + G.transpose()));
  const auto a = solve(p);
  const auto b = solve(p);
  CHECK(a.status == b.status);
  CHECK(a.objective_value == b.objective_value);
  CHECK(a.z == b.z);
}

TEST_CASE("malformed problems are rejected") {
  LmiProblem p = two_by_two();
  p.blocks[0].entries.push_back({3, 0, 0, 1.0});
  CHECK_THROWS_AS(solve(p), Error);
  p = two_by_two();
  p.blocks[0].size = 0;
  CHECK_THROWS_AS(solve(p), Error);
  p = two_by_two();
  p.objective = Vector::Ones(2);
  CHECK_THROWS_AS(solve(p), Error);
  p = two_by_two();
  p.blocks[0].entries.push_back({0, 2, 2, 1.0});
  CHECK_THROWS_AS(solve(p), Error);
}

TEST_CASE("problem json round trip") {
  const auto p = min_eigenvalue_problem(Matrix::Identity(3, 3));
  std::stringstream ss;
  write_problem_json(p, ss);
  const auto q = read_problem_json(ss);
  CHECK(q.num_vars == p.num_vars);
  CHECK(q.objective == p.objective);
  REQUIRE(q.blocks.size() == 1);
  CHECK(q.blocks[0].size == 3);
  const Vector z = Vector::LinSpaced(p.num_vars, 0.1, 0.5);
  CHECK(q.evaluate_block(0, z) == p.evaluate_block(0, z));
  CHECK(ss.str().find("\"num_vars\"") != std::string::npos);
}
