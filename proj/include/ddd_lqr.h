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

#ifndef DDD_LQR_H_
#define DDD_LQR_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define DDD_API __declspec(dllexport)
#else
#define DDD_API __attribute__((visibility("default")))
#endif

/* Status codes. The message of the last failure on the calling thread is
 * available from ddd_last_error(). */
typedef enum {
  DDD_OK = 0,
  DDD_ERR_INVALID_ARGUMENT = 1,
  DDD_ERR_DIMENSION = 2,
  DDD_ERR_NOT_CONVERGED = 3,
  DDD_ERR_SINGULAR = 4,
  DDD_ERR_RANK_DEFICIENT = 5,
  DDD_ERR_IO = 6,
  DDD_ERR_CONFIG = 7,
  DDD_ERR_INTERNAL = 99
} ddd_status;

/* Conic solver outcome, mirrored from the C++ SolveStatus. */
typedef enum {
  DDD_SOLVE_OPTIMAL = 0,
  DDD_SOLVE_PRIMAL_INFEASIBLE = 1,
  DDD_SOLVE_DUAL_INFEASIBLE = 2,
  DDD_SOLVE_NUMERICAL_TROUBLE = 3,
  DDD_SOLVE_ITER_LIMIT = 4
} ddd_solve_status;

typedef struct ddd_system ddd_system;         /* plant plus LQR weights */
typedef struct ddd_trajectory ddd_trajectory; /* X0, U0, X1, W0 */
typedef struct ddd_solution ddd_solution;     /* SDP solution with diagnostics */

typedef struct {
  double gap_tol;
  double feas_tol;
  int max_iter;
} ddd_solver_settings;

DDD_API const char* ddd_version(void);
DDD_API const char* ddd_last_error(void);

/* Strings returned through char** outputs are owned by the caller. */
DDD_API void ddd_string_free(char* s);

/* Matrices are passed row-major. */
DDD_API ddd_status ddd_system_create(int n, int m, const double* A, const double* B, const double* Q, const double* R,
                                     double sigma_u, double sigma_w, double sigma_x0, double sigma_delta,
                                     ddd_system** out);
/* "paper41" or "paper41-printed", with Q = I, R = 1 and sigma_w = 0. */
DDD_API ddd_status ddd_system_create_preset(const char* name, ddd_system** out);
/* Plant keys of a JSON config; experiment keys are accepted and ignored. */
DDD_API ddd_status ddd_system_load(const char* path, ddd_system** out);
DDD_API ddd_status ddd_system_set_sigma_w(ddd_system* system, double sigma_w);
DDD_API ddd_status ddd_system_dims(const ddd_system* system, int* n, int* m);
DDD_API void ddd_system_free(ddd_system* system);

/* JSON with P, K, residual, iterations and open/closed-loop spectral radii. */
DDD_API ddd_status ddd_dare(const ddd_system* system, char** json_out);
/* K (m x n, row-major) of u = -K x. */
DDD_API ddd_status ddd_dare_gain(const ddd_system* system, double* K_out);

/* measurement_mode = 0 for process noise, 1 for measurement noise. */
DDD_API ddd_status ddd_simulate(const ddd_system* system, int T, uint64_t seed, int measurement_mode,
                                ddd_trajectory** out);
DDD_API ddd_status ddd_trajectory_load_csv(const char* path, ddd_trajectory** out);
DDD_API ddd_status ddd_trajectory_write_csv(const ddd_trajectory* data, const char* path);
DDD_API ddd_status ddd_trajectory_dims(const ddd_trajectory* data, int* n, int* m, int* T);
/* Copies one data matrix (row-major). which: 0 = X0, 1 = U0, 2 = X1, 3 = W0. */
DDD_API ddd_status ddd_trajectory_matrix(const ddd_trajectory* data, int which, double* out);
DDD_API void ddd_trajectory_free(ddd_trajectory* data);

DDD_API void ddd_solver_settings_default(ddd_solver_settings* settings);

/* settings may be NULL for defaults. Solver failures are reported through the
 * solution status, not the return code. */
DDD_API ddd_status ddd_solve_ce(const ddd_system* system, const ddd_trajectory* data,
                                const ddd_solver_settings* settings, ddd_solution** out);
DDD_API ddd_status ddd_solve_rp(const ddd_system* system, const ddd_trajectory* data, double eta, int full_form,
                                const ddd_solver_settings* settings, ddd_solution** out);
DDD_API ddd_status ddd_solution_status(const ddd_solution* solution, ddd_solve_status* status);
DDD_API ddd_status ddd_solution_objective(const ddd_solution* solution, double* objective);
/* recovered is set to 0 when X0 Y was singular; K_out is then left untouched. */
DDD_API ddd_status ddd_solution_gain(const ddd_solution* solution, double* K_out, int* recovered);
DDD_API ddd_status ddd_solution_to_json(const ddd_solution* solution, char** json_out);
DDD_API void ddd_solution_free(ddd_solution* solution);

/* Writes the LMI problem as JSON. kind: 0 = CE, 1 = RP. */
DDD_API ddd_status ddd_problem_dump(const ddd_system* system, const ddd_trajectory* data, int kind, double eta,
                                    int full_form, const char* path);

/* signal: "u" (U0), "v" ([U0; W0]) or "z" ([U0; (sigma_u/sigma_w) W0], needs system).
 * JSON PeReport plus the fundamental-rank check when the signal is v or z. */
DDD_API ddd_status ddd_check_pe(const ddd_trajectory* data, const ddd_system* system, int depth, const char* signal,
                                char** json_out);

/* Runs "ce", "rp-fixed" or "rp-growing" and writes its outputs. out_dir may be
 * NULL (config value), jobs <= 0 keeps the config value, seed is used only
 * when has_seed != 0. all_ok receives 1 when every cell solved Optimal. */
DDD_API ddd_status ddd_experiment_run(const char* kind, const char* config_path, const char* out_dir, int jobs,
                                      int has_seed, uint64_t seed, int* all_ok, int* tolerate_failures,
                                      char** summary_json);

#ifdef __cplusplus
}
#endif

#endif /* DDD_LQR_H_ */
