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

#include "ddd_lqr.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "ddd/analytic_oracle.hpp"
#include "ddd/ddd_sdp.hpp"
#include "ddd/error.hpp"
#include "ddd/excitation.hpp"
#include "ddd/experiments.hpp"
#include "ddd/lqr_exact.hpp"
#include "json_util.hpp"

#ifndef DDD_LQR_LAB_VERSION
#define DDD_LQR_LAB_VERSION "unknown"
#endif

struct ddd_system {
  ddd::PlantConfig plant;
};

struct ddd_trajectory {
  ddd::TrajectoryData data;
};

struct ddd_solution {
  ddd::DddSolution sol;
  ddd::TrajectoryData data;
  ddd::LqrWeights weights;
  ddd::LtiSystem system;
  int n = 0;
  int m = 0;
};

namespace {

thread_local std::string g_last_error;

ddd_status code_of(ddd::ErrorKind kind) {
  switch (kind) {
    case ddd::ErrorKind::InvalidArgument:
      return DDD_ERR_INVALID_ARGUMENT;
    case ddd::ErrorKind::DimensionMismatch:
      return DDD_ERR_DIMENSION;
    case ddd::ErrorKind::NotConverged:
      return DDD_ERR_NOT_CONVERGED;
    case ddd::ErrorKind::Singular:
      return DDD_ERR_SINGULAR;
    case ddd::ErrorKind::RankDeficient:
      return DDD_ERR_RANK_DEFICIENT;
    case ddd::ErrorKind::Io:
      return DDD_ERR_IO;
    case ddd::ErrorKind::Config:
      return DDD_ERR_CONFIG;
  }
  return DDD_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes and the thread-local message.
template <typename F>
ddd_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return DDD_OK;
  } catch (const ddd::Error& e) {
    g_last_error = e.what();
    return code_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return DDD_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DDD_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DDD_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) ddd::fail(ddd::ErrorKind::InvalidArgument, std::string(name) + " must not be NULL");
}

ddd::Matrix row_major(const double* p, int rows, int cols, const char* name) {
  require(p, name);
  ddd::Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = p[r * cols + c];
  return M;
}

void copy_row_major(const ddd::Matrix& M, double* out) {
  for (Eigen::Index r = 0; r < M.rows(); ++r)
    for (Eigen::Index c = 0; c < M.cols(); ++c) out[r * M.cols() + c] = M(r, c);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ddd::SolverSettings settings_of(const ddd_solver_settings* s) {
  ddd::SolverSettings out;
  if (s != nullptr) {
    out.gap_tol = s->gap_tol;
    out.feas_tol = s->feas_tol;
    out.max_iter = s->max_iter;
  }
  return out;
}

ddd::detail::json number_or_null(double v) {
  return std::isfinite(v) ? ddd::detail::json(v) : ddd::detail::json();
}

}  // namespace

extern "C" {

const char* ddd_version(void) { return DDD_LQR_LAB_VERSION; }

const char* ddd_last_error(void) { return g_last_error.c_str(); }

void ddd_string_free(char* s) { std::free(s); }

ddd_status ddd_system_create(int n, int m, const double* A, const double* B, const double* Q, const double* R,
                             double sigma_u, double sigma_w, double sigma_x0, double sigma_delta, ddd_system** out) {
  return guarded([&] {
    require(out, "out");
    if (n < 1 || m < 1) ddd::fail(ddd::ErrorKind::InvalidArgument, "n and m must be positive");
    ddd::PlantConfig plant;
    plant.system.A = row_major(A, n, n, "A");
    plant.system.B = row_major(B, n, m, "B");
    plant.system.sigma_u = sigma_u;
    plant.system.sigma_w = sigma_w;
    plant.system.sigma_x0 = sigma_x0;
    plant.system.sigma_delta = sigma_delta;
    plant.weights.Q = row_major(Q, n, n, "Q");
    plant.weights.R = row_major(R, m, m, "R");
    plant.system.validate();
    plant.weights.validate(n, m);
    *out = new ddd_system{std::move(plant)};
  });
}

ddd_status ddd_system_create_preset(const char* name, ddd_system** out) {
  return guarded([&] {
    require(out, "out");
    require(name, "name");
    const std::string preset(name);
    ddd::PlantConfig plant{ddd::paper41(), ddd::paper_weights()};
    if (preset == "paper41-printed") plant.system = ddd::paper41_printed();
    else if (preset != "paper41") ddd::fail(ddd::ErrorKind::InvalidArgument, "unknown preset '" + preset + "'");
    *out = new ddd_system{std::move(plant)};
  });
}

ddd_status ddd_system_load(const char* path, ddd_system** out) {
  return guarded([&] {
    require(out, "out");
    require(path, "path");
    // Experiment configs are a superset of plant configs.
    *out = new ddd_system{ddd::parse_config(path, ddd::ExperimentKind::Ce).plant};
  });
}

ddd_status ddd_system_set_sigma_w(ddd_system* system, double sigma_w) {
  return guarded([&] {
    require(system, "system");
    if (!(sigma_w >= 0.0) || !std::isfinite(sigma_w))
      ddd::fail(ddd::ErrorKind::InvalidArgument, "sigma_w must be finite and nonnegative");
    system->plant.system.sigma_w = sigma_w;
  });
}

ddd_status ddd_system_dims(const ddd_system* system, int* n, int* m) {
  return guarded([&] {
    require(system, "system");
    if (n) *n = static_cast<int>(system->plant.system.n());
    if (m) *m = static_cast<int>(system->plant.system.m());
  });
}

void ddd_system_free(ddd_system* system) { delete system; }

ddd_status ddd_dare(const ddd_system* system, char** json_out) {
  return guarded([&] {
    require(system, "system");
    require(json_out, "json_out");
    const auto& sys = system->plant.system;
    const auto sol = ddd::solve_dare(sys, system->plant.weights);
    ddd::detail::json j;
    j["P"] = ddd::detail::matrix_to_json(sol.P);
    j["K"] = ddd::detail::matrix_to_json(sol.K);
    j["residual"] = sol.residual;
    j["iterations"] = sol.iterations;
    j["open_loop_spectral_radius"] = ddd::spectral_radius(sys.A);
    j["closed_loop_spectral_radius"] = ddd::is_stabilizing(sys, sol.K).spectral_radius;
    j["average_cost"] = number_or_null(ddd::average_cost(sys, system->plant.weights, sol.K));
    *json_out = dup_string(j.dump(2));
  });
}

ddd_status ddd_dare_gain(const ddd_system* system, double* K_out) {
  return guarded([&] {
    require(system, "system");
    require(K_out, "K_out");
    copy_row_major(ddd::solve_dare(system->plant.system, system->plant.weights).K, K_out);
  });
}

ddd_status ddd_simulate(const ddd_system* system, int T, uint64_t seed, int measurement_mode, ddd_trajectory** out) {
  return guarded([&] {
    require(system, "system");
    require(out, "out");
    const auto mode = measurement_mode ? ddd::NoiseMode::Measurement : ddd::NoiseMode::Process;
    *out = new ddd_trajectory{ddd::simulate(system->plant.system, T, seed, mode)};
  });
}

ddd_status ddd_trajectory_load_csv(const char* path, ddd_trajectory** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new ddd_trajectory{ddd::read_trajectory_csv(path)};
  });
}

ddd_status ddd_trajectory_write_csv(const ddd_trajectory* data, const char* path) {
  return guarded([&] {
    require(data, "data");
    require(path, "path");
    ddd::write_trajectory_csv(data->data, std::string(path));
  });
}

ddd_status ddd_trajectory_dims(const ddd_trajectory* data, int* n, int* m, int* T) {
  return guarded([&] {
    require(data, "data");
    if (n) *n = static_cast<int>(data->data.n());
    if (m) *m = static_cast<int>(data->data.m());
    if (T) *T = data->data.T;
  });
}

ddd_status ddd_trajectory_matrix(const ddd_trajectory* data, int which, double* out) {
  return guarded([&] {
    require(data, "data");
    require(out, "out");
    switch (which) {
      case 0:
        copy_row_major(data->data.X0, out);
        break;
      case 1:
        copy_row_major(data->data.U0, out);
        break;
      case 2:
        copy_row_major(data->data.X1, out);
        break;
      case 3:
        copy_row_major(data->data.W0, out);
        break;
      default:
        ddd::fail(ddd::ErrorKind::InvalidArgument, "which must be 0 (X0), 1 (U0), 2 (X1) or 3 (W0)");
    }
  });
}

void ddd_trajectory_free(ddd_trajectory* data) { delete data; }

void ddd_solver_settings_default(ddd_solver_settings* settings) {
  if (settings == nullptr) return;
  const ddd::SolverSettings d;
  settings->gap_tol = d.gap_tol;
  settings->feas_tol = d.feas_tol;
  settings->max_iter = d.max_iter;
}

namespace {

ddd_status solve_common(const ddd_system* system, const ddd_trajectory* data, bool rp, double eta, int full_form,
                        const ddd_solver_settings* settings, ddd_solution** out) {
  return guarded([&] {
    require(system, "system");
    require(data, "data");
    require(out, "out");
    const auto& weights = system->plant.weights;
    const auto problem = rp ? ddd::build_rp(data->data, weights, eta, full_form ? ddd::RpForm::Full : ddd::RpForm::Epigraph)
                            : ddd::build_ce(data->data, weights);
    auto* s = new ddd_solution;
    s->sol = ddd::solve_problem(problem, data->data, settings_of(settings));
    s->data = data->data;
    s->weights = weights;
    s->system = system->plant.system;
    s->n = static_cast<int>(data->data.n());
    s->m = static_cast<int>(data->data.m());
    *out = s;
  });
}

}  // namespace

ddd_status ddd_solve_ce(const ddd_system* system, const ddd_trajectory* data, const ddd_solver_settings* settings,
                        ddd_solution** out) {
  return solve_common(system, data, false, 0.0, 0, settings, out);
}

ddd_status ddd_solve_rp(const ddd_system* system, const ddd_trajectory* data, double eta, int full_form,
                        const ddd_solver_settings* settings, ddd_solution** out) {
  return solve_common(system, data, true, eta, full_form, settings, out);
}

ddd_status ddd_solution_status(const ddd_solution* solution, ddd_solve_status* status) {
  return guarded([&] {
    require(solution, "solution");
    require(status, "status");
    *status = static_cast<ddd_solve_status>(static_cast<int>(solution->sol.solver.status));
  });
}

ddd_status ddd_solution_objective(const ddd_solution* solution, double* objective) {
  return guarded([&] {
    require(solution, "solution");
    require(objective, "objective");
    *objective = solution->sol.objective;
  });
}

ddd_status ddd_solution_gain(const ddd_solution* solution, double* K_out, int* recovered) {
  return guarded([&] {
    require(solution, "solution");
    require(recovered, "recovered");
    *recovered = solution->sol.gain_recovered ? 1 : 0;
    if (solution->sol.gain_recovered) {
      require(K_out, "K_out");
      copy_row_major(solution->sol.K, K_out);
    }
  });
}

ddd_status ddd_solution_to_json(const ddd_solution* solution, char** json_out) {
  return guarded([&] {
    require(solution, "solution");
    require(json_out, "json_out");
    const auto& s = solution->sol;
    ddd::detail::json j;
    j["program"] = ddd::to_string(s.kind);
    if (s.kind == ddd::SdpKind::RobustnessPromoting) {
      j["form"] = ddd::to_string(s.form);
      j["eta"] = s.eta;
    }
    j["T"] = solution->data.T;
    j["seed"] = solution->data.seed;
    j["solver_status"] = ddd::to_string(s.solver.status);
    j["objective"] = number_or_null(s.objective);
    j["dual_objective"] = number_or_null(s.solver.dual_objective);
    j["gap"] = s.solver.gap;
    j["feas"] = s.solver.feas;
    j["iterations"] = s.solver.iterations;
    j["gain_recovered"] = s.gain_recovered;
    if (s.gain_recovered) {
      j["K"] = ddd::detail::matrix_to_json(s.K);
      j["norm_K"] = ddd::sigma_max(s.K);
      j["closed_loop_spectral_radius"] = ddd::is_stabilizing(solution->system, s.K).spectral_radius;
    } else {
      j["gain_error"] = s.gain_error;
    }
    j["diagnostics"] = {{"norm_X0Y", s.diagnostics.norm_X0Y},
                        {"norm_X0Y_minus_I", s.diagnostics.norm_X0Y_minus_I},
                        {"norm_U0Y", s.diagnostics.norm_U0Y},
                        {"norm_X1Y", s.diagnostics.norm_X1Y},
                        {"sigma_min_X0Y", s.diagnostics.sigma_min_X0Y}};
    if (s.Y.size() > 0) j["block_min_eigenvalues"] = ddd::verify_feasibility(solution->data, solution->weights, s);
    *json_out = dup_string(j.dump(2));
  });
}

void ddd_solution_free(ddd_solution* solution) { delete solution; }

ddd_status ddd_problem_dump(const ddd_system* system, const ddd_trajectory* data, int kind, double eta, int full_form,
                            const char* path) {
  return guarded([&] {
    require(system, "system");
    require(data, "data");
    require(path, "path");
    const auto& weights = system->plant.weights;
    const auto problem =
        kind == 1 ? ddd::build_rp(data->data, weights, eta, full_form ? ddd::RpForm::Full : ddd::RpForm::Epigraph)
                  : ddd::build_ce(data->data, weights);
    ddd::write_problem_json(problem.lmi, std::string(path));
  });
}

ddd_status ddd_check_pe(const ddd_trajectory* data, const ddd_system* system, int depth, const char* signal,
                        char** json_out) {
  return guarded([&] {
    require(data, "data");
    require(json_out, "json_out");
    const std::string sig = signal ? signal : "u";
    const auto& d = data->data;
    ddd::Matrix F;
    if (sig == "u") {
      F = d.U0;
    } else if (sig == "v") {
      F.resize(d.U0.rows() + d.W0.rows(), d.T);
      F << d.U0, d.W0;
    } else if (sig == "z") {
      require(system, "system");
      ddd::LtiSystem sys = system->plant.system;
      F = ddd::stacked_input(d, sys, ddd::InputScaling::Isotropic);
    } else {
      ddd::fail(ddd::ErrorKind::InvalidArgument, "signal must be u, v or z");
    }
    const auto rep = ddd::pe_check(F, depth);
    ddd::detail::json j;
    j["signal"] = sig;
    j["order"] = rep.order;
    j["hankel_rank"] = rep.hankel_rank;
    j["required_rank"] = rep.required_rank;
    j["min_singular_value"] = rep.min_singular_value;
    j["is_pe"] = rep.is_pe;
    if (!rep.reason.empty()) j["reason"] = rep.reason;
    if (sig != "u") {
      const auto fr = ddd::fundamental_rank_check(d.X0, F);
      j["fundamental_rank"] = {{"full_rank", fr.full_rank},
                               {"inconclusive", fr.inconclusive},
                               {"rank", fr.rank},
                               {"required_rank", fr.required_rank}};
    }
    *json_out = dup_string(j.dump(2));
  });
}

ddd_status ddd_experiment_run(const char* kind, const char* config_path, const char* out_dir, int jobs, int has_seed,
                              uint64_t seed, int* all_ok, int* tolerate_failures, char** summary_json) {
  return guarded([&] {
    require(kind, "kind");
    require(config_path, "config_path");
    const auto k = ddd::experiment_kind_from_string(kind);
    auto config = ddd::parse_config(config_path, k);
    if (out_dir != nullptr) config.output_dir = out_dir;
    if (jobs > 0) config.jobs = jobs;
    if (has_seed) config.base_seed = seed;
    const auto result = ddd::run_experiment(config, k);
    ddd::write_outputs(result, config.output_dir);
    if (all_ok) *all_ok = result.all_ok() ? 1 : 0;
    if (tolerate_failures) *tolerate_failures = config.tolerate_failures ? 1 : 0;
    if (summary_json) {
      ddd::detail::json rows = ddd::detail::json::array();
      for (const auto& s : result.summary)
        rows.push_back({{"experiment_id", s.experiment_id},
                        {"sigma_w", s.sigma_w},
                        {"T", s.T},
                        {"eta", s.eta},
                        {"n_ok", s.n_ok},
                        {"n_total", s.n_total},
                        {"mean_norm_K", number_or_null(s.mean_norm_K)},
                        {"var_norm_K", number_or_null(s.var_norm_K)}});
      ddd::detail::json j;
      j["experiment"] = kind;
      j["output_dir"] = config.output_dir;
      j["records"] = result.records.size();
      j["all_ok"] = result.all_ok();
      j["summary"] = std::move(rows);
      *summary_json = dup_string(j.dump(2));
    }
  });
}

}  // extern "C"
