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

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ddd_lqr.h"

using json = nlohmann::json;

namespace {

json take_json(char* s) {
  json j = json::parse(s);
  ddd_string_free(s);
  return j;
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(ddd_version()) == "0.1.0");
  ddd_system* sys = nullptr;
  CHECK(ddd_system_create_preset("nonexistent", &sys) == DDD_ERR_INVALID_ARGUMENT);
  CHECK(sys == nullptr);
  CHECK(std::string(ddd_last_error()).find("nonexistent") != std::string::npos);
  CHECK(ddd_system_create_preset("paper41", nullptr) == DDD_ERR_INVALID_ARGUMENT);
  CHECK(ddd_system_load("/no/such/config.json", &sys) == DDD_ERR_IO);
  const double A[] = {1.0};
  const double B[] = {1.0, 2.0};
  const double Q[] = {1.0};
  const double R[] = {-1.0};
  CHECK(ddd_system_create(1, 1, A, B, Q, R, 1.0, 0.0, 0.0, 0.0, &sys) == DDD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("DARE through the C interface") {
  ddd_system* sys = nullptr;
  REQUIRE(ddd_system_create_preset("paper41", &sys) == DDD_OK);
  int n = 0, m = 0;
  REQUIRE(ddd_system_dims(sys, &n, &m) == DDD_OK);
  CHECK(n == 2);
  CHECK(m == 1);
  double K[2];
  REQUIRE(ddd_dare_gain(sys, K) == DDD_OK);
  CHECK(std::abs(K[0] + 0.7112) <= 1e-3);
  CHECK(std::abs(K[1] + 0.2046) <= 1e-3);
  char* text = nullptr;
  REQUIRE(ddd_dare(sys, &text) == DDD_OK);
  const auto j = take_json(text);
  CHECK(j["open_loop_spectral_radius"].get<double>() == doctest::Approx(1.01).epsilon(1e-3));
  CHECK(j["K"][0][0].get<double>() == K[0]);
  ddd_system_free(sys);
}

TEST_CASE("custom system, simulation and solves") {
  const double A[] = {0.5, 0.1, 0.0, 0.8};
  const double B[] = {1.0, 0.5};
  const double Q[] = {1.0, 0.0, 0.0, 1.0};
  const double R[] = {1.0};
  ddd_system* sys = nullptr;
  REQUIRE(ddd_system_create(2, 1, A, B, Q, R, 1.0, 0.0, 0.0, 0.0, &sys) == DDD_OK);

  ddd_trajectory* data = nullptr;
  REQUIRE(ddd_simulate(sys, 30, 7, 0, &data) == DDD_OK);
  int n = 0, m = 0, T = 0;
  REQUIRE(ddd_trajectory_dims(data, &n, &m, &T) == DDD_OK);
  CHECK(T == 30);
  double X0[60], U0[30], X1[60];
  REQUIRE(ddd_trajectory_matrix(data, 0, X0) == DDD_OK);
  REQUIRE(ddd_trajectory_matrix(data, 1, U0) == DDD_OK);
  REQUIRE(ddd_trajectory_matrix(data, 2, X1) == DDD_OK);
  CHECK(ddd_trajectory_matrix(data, 7, X0) == DDD_ERR_INVALID_ARGUMENT);
  // Row-major layout: x1 row first.
  for (int t = 0; t < 30; ++t) {
    CHECK(X1[t] == doctest::Approx(0.5 * X0[t] + 0.1 * X0[30 + t] + 1.0 * U0[t]));
    CHECK(X1[30 + t] == doctest::Approx(0.8 * X0[30 + t] + 0.5 * U0[t]));
  }

  ddd_solution* sol = nullptr;
  REQUIRE(ddd_solve_ce(sys, data, nullptr, &sol) == DDD_OK);
  ddd_solve_status st;
  REQUIRE(ddd_solution_status(sol, &st) == DDD_OK);
  CHECK(st == DDD_SOLVE_OPTIMAL);
  double K[2], Kd[2];
  int recovered = 0;
  REQUIRE(ddd_solution_gain(sol, K, &recovered) == DDD_OK);
  CHECK(recovered == 1);
  REQUIRE(ddd_dare_gain(sys, Kd) == DDD_OK);
  CHECK(std::abs(K[0] - Kd[0]) <= 1e-3);
  CHECK(std::abs(K[1] - Kd[1]) <= 1e-3);
  char* text = nullptr;
  REQUIRE(ddd_solution_to_json(sol, &text) == DDD_OK);
  const auto j = take_json(text);
  CHECK(j["solver_status"] == "Optimal");
  CHECK(j["program"] == "ce");
  ddd_solution_free(sol);

  REQUIRE(ddd_system_set_sigma_w(sys, 1.0) == DDD_OK);
  ddd_trajectory* noisy = nullptr;
  REQUIRE(ddd_simulate(sys, 20, 3, 0, &noisy) == DDD_OK);
  ddd_solver_settings settings;
  ddd_solver_settings_default(&settings);
  CHECK(settings.gap_tol == 1e-8);
  ddd_solution* full = nullptr;
  ddd_solution* epi = nullptr;
  REQUIRE(ddd_solve_rp(sys, noisy, 1.0, 1, &settings, &full) == DDD_OK);
  REQUIRE(ddd_solve_rp(sys, noisy, 1.0, 0, &settings, &epi) == DDD_OK);
  double of = 0, oe = 0;
  REQUIRE(ddd_solution_objective(full, &of) == DDD_OK);
  REQUIRE(ddd_solution_objective(epi, &oe) == DDD_OK);
  CHECK(std::abs(of - oe) <= 1e-6);
  ddd_solution_free(full);
  ddd_solution_free(epi);

  CHECK(ddd_solve_rp(sys, noisy, -1.0, 0, nullptr, &full) == DDD_ERR_INVALID_ARGUMENT);

  const std::string dump = "c_api_problem.json";
  REQUIRE(ddd_problem_dump(sys, noisy, 1, 1.0, 0, dump.c_str()) == DDD_OK);
  std::ifstream in(dump);
  const json pj = json::parse(in);
  CHECK(pj.contains("num_vars"));
  CHECK(pj["blocks"].size() == 2 + 20);
  std::remove(dump.c_str());

  char* pe = nullptr;
  REQUIRE(ddd_check_pe(noisy, sys, 3, "z", &pe) == DDD_OK);
  const auto pj2 = take_json(pe);
  CHECK(pj2["is_pe"] == true);
  CHECK(pj2["fundamental_rank"]["full_rank"] == true);
  CHECK(ddd_check_pe(noisy, sys, 3, "q", &pe) == DDD_ERR_INVALID_ARGUMENT);

  const std::string csv = "c_api_traj.csv";
  REQUIRE(ddd_trajectory_write_csv(noisy, csv.c_str()) == DDD_OK);
  ddd_trajectory* back = nullptr;
  REQUIRE(ddd_trajectory_load_csv(csv.c_str(), &back) == DDD_OK);
  double a[40], b[40];
  REQUIRE(ddd_trajectory_matrix(noisy, 0, a) == DDD_OK);
  REQUIRE(ddd_trajectory_matrix(back, 0, b) == DDD_OK);
  for (int i = 0; i < 40; ++i) CHECK(a[i] == b[i]);
  std::remove(csv.c_str());

  ddd_trajectory_free(back);
  ddd_trajectory_free(noisy);
  ddd_trajectory_free(data);
  ddd_system_free(sys);
}

TEST_CASE("experiment through the C interface") {
  const std::string cfg = "c_api_experiment.json";
  {
    std::ofstream out(cfg);
    out << R"({"preset": "paper41", "sigma_w": 1.0, "T_grid": [15], "n_runs": 2})";
  }
  int all_ok = 0, tolerate = 1;
  char* summary = nullptr;
  REQUIRE(ddd_experiment_run("rp-fixed", cfg.c_str(), "c_api_out", 1, 1, 5, &all_ok, &tolerate, &summary) == DDD_OK);
  CHECK(all_ok == 1);
  CHECK(tolerate == 0);
  const auto j = take_json(summary);
  CHECK(j["records"] == 4);
  CHECK(std::filesystem::exists("c_api_out/records.csv"));
  CHECK(ddd_experiment_run("bogus", cfg.c_str(), nullptr, 0, 0, 0, nullptr, nullptr, nullptr) ==
        DDD_ERR_INVALID_ARGUMENT);
  std::filesystem::remove_all("c_api_out");
  std::remove(cfg.c_str());
}
