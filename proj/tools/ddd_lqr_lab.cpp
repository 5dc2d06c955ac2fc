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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "ddd_lqr.h"

namespace {

using json = nlohmann::json;

struct Failure {
  int code;
};

void check(ddd_status status, const char* what) {
  if (status != DDD_OK) {
    std::cerr << "ddd-lqr-lab: " << what << ": " << ddd_last_error() << "\n";
    throw Failure{2};
  }
}

struct SystemDeleter {
  void operator()(ddd_system* p) const { ddd_system_free(p); }
};
struct TrajectoryDeleter {
  void operator()(ddd_trajectory* p) const { ddd_trajectory_free(p); }
};
struct SolutionDeleter {
  void operator()(ddd_solution* p) const { ddd_solution_free(p); }
};
using SystemPtr = std::unique_ptr<ddd_system, SystemDeleter>;
using TrajectoryPtr = std::unique_ptr<ddd_trajectory, TrajectoryDeleter>;
using SolutionPtr = std::unique_ptr<ddd_solution, SolutionDeleter>;

std::string take(char* s) {
  std::string out(s);
  ddd_string_free(s);
  return out;
}

struct PlantOptions {
  std::string config;
  std::string preset = "paper41";
  std::optional<double> sigma_w;
};

void add_plant_options(CLI::App* cmd, PlantOptions& o) {
  cmd->add_option("--config", o.config, "JSON config with plant keys");
  cmd->add_option("--preset", o.preset, "plant preset when no config is given")
      ->check(CLI::IsMember({"paper41", "paper41-printed"}));
  cmd->add_option("--sigma-w", o.sigma_w, "override the process noise standard deviation");
}

SystemPtr make_system(const PlantOptions& o) {
  ddd_system* sys = nullptr;
  if (!o.config.empty()) check(ddd_system_load(o.config.c_str(), &sys), "loading config");
  else check(ddd_system_create_preset(o.preset.c_str(), &sys), "creating preset");
  SystemPtr out(sys);
  if (o.sigma_w) check(ddd_system_set_sigma_w(out.get(), *o.sigma_w), "setting sigma_w");
  return out;
}

struct DataOptions {
  std::string data;
  int T = 50;
  std::uint64_t seed = 1;
  bool measurement = false;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--data", o.data, "trajectory CSV (otherwise simulated)");
  cmd->add_option("--T", o.T, "horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "simulation seed");
  cmd->add_flag("--measurement-noise", o.measurement, "perturb measurements instead of the dynamics");
}

TrajectoryPtr make_data(const ddd_system* sys, const DataOptions& o) {
  ddd_trajectory* data = nullptr;
  if (!o.data.empty()) check(ddd_trajectory_load_csv(o.data.c_str(), &data), "reading trajectory");
  else check(ddd_simulate(sys, o.T, o.seed, o.measurement ? 1 : 0, &data), "simulating");
  return TrajectoryPtr(data);
}

void print_matrix(const char* name, const json& rows) {
  std::printf("%s =\n", name);
  for (const auto& row : rows) {
    for (const auto& v : row) std::printf("  % .10f", v.get<double>());
    std::printf("\n");
  }
}

int run_dare(const PlantOptions& plant, bool as_json) {
  auto sys = make_system(plant);
  char* text = nullptr;
  check(ddd_dare(sys.get(), &text), "solving the DARE");
  const std::string s = take(text);
  if (as_json) {
    std::cout << s << "\n";
    return 0;
  }
  const auto j = json::parse(s);
  print_matrix("P", j["P"]);
  print_matrix("K", j["K"]);
  std::printf("residual = %.3e\n", j["residual"].get<double>());
  std::printf("iterations = %d\n", j["iterations"].get<int>());
  std::printf("spectral radius of A = %.6f\n", j["open_loop_spectral_radius"].get<double>());
  std::printf("spectral radius of A - BK = %.6f\n", j["closed_loop_spectral_radius"].get<double>());
  return 0;
}

int run_simulate(const PlantOptions& plant, const DataOptions& d, const std::string& out) {
  auto sys = make_system(plant);
  auto data = make_data(sys.get(), d);
  check(ddd_trajectory_write_csv(data.get(), out.c_str()), "writing trajectory");
  return 0;
}

struct SolveOptions {
  double eta = 1.0;
  std::string form = "epigraph";
  std::string dump;
};

int run_solve(bool rp, const PlantOptions& plant, const DataOptions& d, const SolveOptions& o) {
  auto sys = make_system(plant);
  auto data = make_data(sys.get(), d);
  const int full = o.form == "full" ? 1 : 0;
  if (!o.dump.empty())
    check(ddd_problem_dump(sys.get(), data.get(), rp ? 1 : 0, o.eta, full, o.dump.c_str()), "dumping problem");
  ddd_solution* raw = nullptr;
  if (rp) check(ddd_solve_rp(sys.get(), data.get(), o.eta, full, nullptr, &raw), "solving");
  else check(ddd_solve_ce(sys.get(), data.get(), nullptr, &raw), "solving");
  SolutionPtr sol(raw);
  char* text = nullptr;
  check(ddd_solution_to_json(sol.get(), &text), "serializing solution");
  std::cout << take(text) << "\n";
  ddd_solve_status status = DDD_SOLVE_NUMERICAL_TROUBLE;
  check(ddd_solution_status(sol.get(), &status), "reading status");
  return status == DDD_SOLVE_OPTIMAL ? 0 : 1;
}

int run_check_pe(const PlantOptions& plant, const DataOptions& d, int depth, const std::string& signal) {
  auto sys = make_system(plant);
  auto data = make_data(sys.get(), d);
  char* text = nullptr;
  check(ddd_check_pe(data.get(), sys.get(), depth, signal.c_str(), &text), "checking excitation");
  const std::string s = take(text);
  std::cout << s << "\n";
  return json::parse(s)["is_pe"].get<bool>() ? 0 : 1;
}

int run_experiment(const std::string& kind, const std::string& config, const std::string& out, int jobs,
                   std::optional<std::uint64_t> seed) {
  int all_ok = 0;
  int tolerate = 0;
  char* text = nullptr;
  check(ddd_experiment_run(kind.c_str(), config.c_str(), out.empty() ? nullptr : out.c_str(), jobs, seed ? 1 : 0,
                           seed.value_or(0), &all_ok, &tolerate, &text),
        "running experiment");
  std::cout << take(text) << "\n";
  return all_ok || tolerate ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct data-driven LQR laboratory"};
  app.set_version_flag("--version", std::string(ddd_version()));
  app.require_subcommand(1);

  PlantOptions plant;
  DataOptions data;
  SolveOptions solve;

  bool dare_json = false;
  auto* dare = app.add_subcommand("dare", "solve the Riccati equation of the plant");
  add_plant_options(dare, plant);
  dare->add_flag("--json", dare_json, "print JSON instead of text");

  std::string sim_out;
  auto* sim = app.add_subcommand("simulate", "simulate a trajectory and write it as CSV");
  add_plant_options(sim, plant);
  add_data_options(sim, data);
  sim->add_option("--out", sim_out, "output CSV")->required();

  auto* ce = app.add_subcommand("solve-ce", "solve the certainty-equivalence SDP");
  add_plant_options(ce, plant);
  add_data_options(ce, data);
  ce->add_option("--dump-problem", solve.dump, "write the LMI problem as JSON");

  auto* rp = app.add_subcommand("solve-rp", "solve the robustness-promoting SDP");
  add_plant_options(rp, plant);
  add_data_options(rp, data);
  rp->add_option("--eta", solve.eta, "regularization weight")->check(CLI::PositiveNumber);
  rp->add_option("--form", solve.form, "full or epigraph")->check(CLI::IsMember({"full", "epigraph"}));
  rp->add_option("--dump-problem", solve.dump, "write the LMI problem as JSON");

  int depth = 3;
  std::string signal = "u";
  auto* pe = app.add_subcommand("check-pe", "test persistency of excitation of a trajectory");
  add_plant_options(pe, plant);
  add_data_options(pe, data);
  pe->add_option("--depth", depth, "Hankel depth")->check(CLI::PositiveNumber);
  pe->add_option("--signal", signal, "u, v = [u; w] or z = [u; (sigma_u/sigma_w) w]")
      ->check(CLI::IsMember({"u", "v", "z"}));

  std::string exp_kind;
  std::string exp_config;
  std::string exp_out;
  int jobs = 0;
  std::optional<std::uint64_t> exp_seed;
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  exp->add_option("kind", exp_kind, "ce, rp-fixed or rp-growing")
      ->required()
      ->check(CLI::IsMember({"ce", "rp-fixed", "rp-growing"}));
  exp->add_option("--config", exp_config, "experiment config")->required();
  exp->add_option("--out", exp_out, "output directory (overrides the config)");
  exp->add_option("--jobs", jobs, "worker threads (overrides the config)")->check(CLI::PositiveNumber);
  exp->add_option("--seed", exp_seed, "base seed (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*dare) return run_dare(plant, dare_json);
    if (*sim) return run_simulate(plant, data, sim_out);
    if (*ce) return run_solve(false, plant, data, solve);
    if (*rp) return run_solve(true, plant, data, solve);
    if (*pe) return run_check_pe(plant, data, depth, signal);
    if (*exp) return run_experiment(exp_kind, exp_config, exp_out, jobs, exp_seed);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "ddd-lqr-lab: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
