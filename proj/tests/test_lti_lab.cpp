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

#include <cstdio>
#include <fstream>
#include <string>

#include "ddd/error.hpp"
#include "ddd/lti_lab.hpp"
#include "ddd/rng.hpp"
#include "test_util.hpp"

using namespace ddd;
using ddd::testing::max_abs;
using ddd::testing::paper_plant;
using ddd::testing::random_plant;

namespace {

LtiSystem scalar(double a, double b, double sigma_w) {
  LtiSystem s;
  s.A = Matrix::Constant(1, 1, a);
  s.B = Matrix::Constant(1, 1, b);
  s.sigma_w = sigma_w;
  return s;
}

bool identical(const TrajectoryData& a, const TrajectoryData& b) {
  return a.X0 == b.X0 && a.U0 == b.U0 && a.X1 == b.X1 && a.W0 == b.W0;
}

}  // namespace

TEST_CASE("normal stream is deterministic and roughly standard") {
  NormalStream a(42), b(42), c(43);
  double sum = 0.0, sq = 0.0;
  bool differs = false;
  const int N = 20000;
  for (int i = 0; i < N; ++i) {
    const double x = a.next();
    CHECK(x == b.next());
    differs = differs || x != c.next();
    sum += x;
    sq += x * x;
  }
  CHECK(differs);
  CHECK(std::abs(sum / N) < 0.03);
  CHECK(std::abs(sq / N - 1.0) < 0.05);
}

TEST_CASE("cell seeds differ across horizons and runs") {
  CHECK(cell_seed(1, 25, 0) != cell_seed(1, 25, 1));
  CHECK(cell_seed(1, 25, 0) != cell_seed(1, 50, 0));
  CHECK(cell_seed(1, 25, 0) != cell_seed(2, 25, 0));
  CHECK(cell_seed(7, 100, 3) == cell_seed(7, 100, 3));
}

TEST_CASE("system validation") {
  LtiSystem s = scalar(0.5, 1.0, 0.0);
  CHECK_NOTHROW(s.validate());
  s.sigma_u = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = scalar(0.5, 1.0, 0.0);
  s.B = Matrix::Ones(2, 1);
  CHECK_THROWS_AS(s.validate(), Error);
  s = scalar(0.5, 1.0, -1.0);
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("simulate with zero dynamics shifts the input") {
  const auto d = simulate(scalar(0.0, 1.0, 0.0), 4, 9);
  CHECK(d.X1 == d.U0);
  CHECK(d.X0(0, 0) == 0.0);
  for (int t = 1; t < 4; ++t) CHECK(d.X0(0, t) == d.U0(0, t - 1));
}

TEST_CASE("simulate without noise obeys the dynamics exactly") {
  const auto p = paper_plant(0.0);
  const auto d = simulate(p.system, 30, 5);
  CHECK(max_abs(d.W0) == 0.0);
  CHECK(max_abs(d.X1 - p.system.A * d.X0 - p.system.B * d.U0) < 1e-12);
}

TEST_CASE("process-mode trajectories satisfy the state equation and the shift") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_plant(seed, 3, 2, 0.7);
    const auto d = simulate(p.system, 40, seed);
    const Matrix res = d.X1 - p.system.A * d.X0 - p.system.B * d.U0 - d.W0;
    CHECK(max_abs(res) < 1e-12);
    CHECK(d.X0.rightCols(39) == d.X1.leftCols(39));
  }
}

TEST_CASE("simulate is reproducible per seed") {
  const auto p = paper_plant(1.0);
  const auto a = simulate(p.system, 50, 11);
  const auto b = simulate(p.system, 50, 11);
  const auto c = simulate(p.system, 50, 12);
  CHECK(identical(a, b));
  CHECK(a.U0 != c.U0);
  CHECK(a.seed == 11);
  CHECK(a.T == 50);
}

TEST_CASE("input sequence does not depend on the noise scale") {
  const auto a = simulate(paper_plant(0.0).system, 20, 3);
  const auto b = simulate(paper_plant(1.0).system, 20, 3);
  CHECK(a.U0 == b.U0);
}

TEST_CASE("measurement mode perturbs the states and keeps W0 zero") {
  auto s = paper_plant(0.0).system;
  s.sigma_delta = 0.1;
  const auto d = simulate(s, 20, 4, NoiseMode::Measurement);
  CHECK(max_abs(d.W0) == 0.0);
  CHECK(d.noise_mode == NoiseMode::Measurement);
  CHECK(max_abs(d.X1 - s.A * d.X0 - s.B * d.U0) > 1e-3);
  CHECK(d.X0.rightCols(19) == d.X1.leftCols(19));
}

TEST_CASE("simulate rejects a nonpositive horizon") { CHECK_THROWS_AS(simulate(paper_plant(0.0).system, 0, 1), Error); }

TEST_CASE("combined matrix stacks the data") {
  TrajectoryData d;
  d.T = 2;
  d.X0 = (Matrix(1, 2) << 1, 2).finished();
  d.U0 = (Matrix(1, 2) << 3, 4).finished();
  d.X1 = (Matrix(1, 2) << 5, 6).finished();
  const Matrix expected = (Matrix(3, 2) << 1, 2, 3, 4, 5, 6).finished();
  CHECK(combined_matrix(d) == expected);
}

TEST_CASE("noiseless zero plant gives a rank deficient combined matrix") {
  const auto d = simulate(scalar(0.0, 1.0, 0.0), 10, 2);
  CHECK(numerical_rank(combined_matrix(d)) <= 2);
}

TEST_CASE("noisy combined matrix has full row rank") {
  const auto p = paper_plant(1.0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) CHECK(numerical_rank(combined_matrix(simulate(p.system, 20, seed))) == 5);
}

TEST_CASE("combined matrix factors through the noise-as-input stack") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_plant(seed, 2, 2, 0.5);
    const auto& s = p.system;
    const auto d = simulate(s, 15, seed);
    const int n = 2, m = 2;
    Matrix P1 = Matrix::Zero(2 * n + m, 2 * n + m);
    P1.topLeftCorner(n + m, n + m).setIdentity();
    P1.block(n + m, 0, n, n) = s.A;
    P1.block(n + m, n, n, m) = s.B;
    P1.block(n + m, n + m, n, n).setIdentity();
    Matrix bar(2 * n + m, d.T);
    bar << d.X0, d.U0, d.W0;
    CHECK(max_abs(combined_matrix(d) - P1 * bar) < 1e-12);
  }
}

TEST_CASE("stacked input scaling") {
  TrajectoryData d;
  d.T = 1;
  d.X0 = Matrix::Zero(1, 1);
  d.X1 = Matrix::Zero(1, 1);
  d.U0 = Matrix::Constant(1, 1, 1.0);
  d.W0 = Matrix::Constant(1, 1, 2.0);
  LtiSystem s = scalar(0.0, 1.0, 2.0);
  const Matrix z = stacked_input(d, s, InputScaling::Isotropic);
  CHECK(z(0, 0) == 1.0);
  CHECK(z(1, 0) == doctest::Approx(1.0));
  s.sigma_w = 1.0;
  CHECK(stacked_input(d, s, InputScaling::Plain) == stacked_input(d, s, InputScaling::Isotropic));
  s.sigma_w = 0.0;
  CHECK_THROWS_AS(stacked_input(d, s, InputScaling::Isotropic), Error);
}

TEST_CASE("isotropic input has covariance sigma_u^2 I") {
  auto s = paper_plant(0.3).system;
  s.sigma_u = 1.5;
  const auto d = simulate(s, 10000, 8);
  const Matrix Z = stacked_input(d, s, InputScaling::Isotropic);
  const Matrix cov = Z * Z.transpose() / double(d.T);
  const Matrix target = s.sigma_u * s.sigma_u * Matrix::Identity(3, 3);
  CHECK((cov - target).norm() / target.norm() < 0.05);
}

TEST_CASE("controllability") {
  LtiSystem s;
  s.A = Matrix::Zero(2, 2);
  s.B = Matrix::Identity(2, 2);
  CHECK(controllability_check(s));
  s.A = Matrix::Identity(2, 2);
  s.B = (Matrix(2, 1) << 1, 0).finished();
  CHECK_FALSE(controllability_check(s));
  const auto p = paper41();
  Matrix C(2, 2);
  C << p.B, p.A * p.B;
  CHECK(std::abs(C.determinant()) > 1e-3);
  CHECK(controllability_check(p));
}

TEST_CASE("trajectory csv round trip") {
  const auto p = paper_plant(0.5);
  const auto d = simulate(p.system, 12, 21);
  const std::string path = "lti_roundtrip_test.csv";
  write_trajectory_csv(d, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,x_1,x_2,u_1,w_1,w_2");
  in.close();
  const auto r = read_trajectory_csv(path);
  CHECK(r.T == d.T);
  CHECK(r.X0 == d.X0);
  CHECK(r.U0 == d.U0);
  CHECK(r.X1 == d.X1);
  CHECK(r.W0 == d.W0);
  std::remove(path.c_str());
}

TEST_CASE("plant config keys") {
  const std::string path = "plant_config_test.json";
  {
    std::ofstream out(path);
    out << R"({"A": [[0.5, 0.1], [0.0, 0.7]], "B": [[1.0], [0.5]], "sigma_w": 0.2, "R": [[2.0]]})";
  }
  const auto c = load_plant_config(path);
  CHECK(c.system.A(0, 1) == 0.1);
  CHECK(c.system.B(1, 0) == 0.5);
  CHECK(c.system.sigma_w == 0.2);
  CHECK(c.weights.Q == Matrix::Identity(2, 2));
  CHECK(c.weights.R(0, 0) == 2.0);
  {
    std::ofstream out(path);
    out << R"({"preset": "paper41", "bogus": 1})";
  }
  CHECK_THROWS_AS(load_plant_config(path), Error);
  std::remove(path.c_str());
}
