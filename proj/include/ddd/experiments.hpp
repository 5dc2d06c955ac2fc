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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddd/conic_solver.hpp"
#include "ddd/ddd_sdp.hpp"
#include "ddd/lti_lab.hpp"

namespace ddd {

enum class ExperimentKind { Ce, RpFixed, RpGrowing };
const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

/// eta(T) = value (fixed) or slope * T (linear).
struct EtaPolicy {
  enum class Kind { Fixed, Linear };
  Kind kind = Kind::Fixed;
  double value = 1.0;
  double eta(int T) const { return kind == Kind::Fixed ? value : value * T; }
};

struct ExperimentConfig {
  PlantConfig plant{paper41(), paper_weights()};
  std::vector<int> T_grid{25, 50, 100, 200};
  EtaPolicy eta_policy;
  int n_runs = 10;
  std::uint64_t base_seed = 1;
  SolverSettings solver;
  std::string output_dir = "out";
  NoiseMode noise_mode = NoiseMode::Process;
  RpForm rp_form = RpForm::Epigraph;
  bool noiseless_branch = false;  ///< RP sweeps: also run every cell with sigma_w = 0
  bool tolerate_failures = false;
  bool record_wall_time = false;  ///< wall_time is "NA" otherwise, keeping records.csv reproducible
  int ce_horizon = 50;
  double ce_sigma_w = 0.0031622776601683794;  ///< sqrt(1e-5)
  double rho = 0.0;  ///< plant constant for the theoretical bound; 0 selects the per-cell empirical estimate
  int jobs = 1;

  /// Throws Error(Config) on violated invariants.
  void validate() const;
};

/// Defaults for one experiment: rp-growing uses eta = 10 T, rp-fixed eta = 1
/// with the noiseless branch enabled.
ExperimentConfig default_config(ExperimentKind kind);

/// JSON config: plant keys (`preset`, `weights`, `A`, `B`, `Q`, `R`, `sigma_*`)
/// plus `T_grid`, `eta_policy` ({"kind": "fixed", "value": v} or
/// {"kind": "linear", "slope": s}), `n_runs`, `base_seed`, `solver`
/// ({gap_tol, feas_tol, max_iter}), `output_dir`, `noise_mode`, `rp_form`,
/// `noiseless_branch`, `tolerate_failures`, `record_wall_time`, `ce_horizon`,
/// `ce_sigma_w`, `rho`, `jobs`. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& path, ExperimentKind kind);
ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind, const std::string& where = "config");

struct ExperimentRecord {
  std::string experiment_id;
  std::uint64_t seed = 0;
  int T = 0;
  double eta = 0.0;
  double sigma_w = 0.0;
  SolveStatus solver_status = SolveStatus::NumericalTrouble;
  bool gain_recovered = false;
  double norm_K = 0.0;
  Matrix K;
  double norm_X0Y = 0.0;
  double norm_U0Y = 0.0;
  double norm_X1Y = 0.0;
  double objective = 0.0;
  double rp_bound = 0.0;  ///< NaN for CE cells, +inf when D_T is rank deficient
  double sigma_min_DT = 0.0;
  double wall_time = 0.0;

  // Kept in memory and in oracle-report.json, not in records.csv.
  int run_index = 0;
  double norm_X0Y_minus_I = 0.0;
  int rank_DT = 0;
  Matrix K_predicted;
  double closed_loop_radius = 0.0;
  double psi_gap = 0.0;
  double lemma1_lambda_max = 0.0;
  double rp_bound_theoretical = 0.0;
  double rho_used = 0.0;

  /// Optimal status with a recovered gain.
  bool ok() const { return solver_status == SolveStatus::Optimal && gain_recovered; }
};

struct SummaryRow {
  std::string experiment_id;
  double sigma_w = 0.0;
  int T = 0;
  double eta = 0.0;
  int n_total = 0;
  int n_ok = 0;
  double mean_norm_K = 0.0;
  double var_norm_K = 0.0;  ///< sample variance (n - 1 denominator), 0 for one run
  double mean_norm_X0Y = 0.0;
  double mean_norm_X0Y_minus_I = 0.0;
  double mean_norm_U0Y = 0.0;
  double mean_norm_X1Y = 0.0;
  double mean_objective = 0.0;
  double mean_rp_bound = 0.0;
};

struct ExperimentResult {
  ExperimentKind kind = ExperimentKind::Ce;
  ExperimentConfig config;
  Matrix K_lqr;
  std::vector<ExperimentRecord> records;  ///< sorted by (T, seed, sigma_w)
  std::vector<SummaryRow> summary;
  bool all_ok() const;
};

/// One Monte Carlo cell: simulate, solve, and evaluate the oracle quantities.
ExperimentRecord run_cell(const ExperimentConfig& config, ExperimentKind kind, int T, int run_index, double sigma_w);

ExperimentResult run_ce_experiment(const ExperimentConfig& config);
ExperimentResult run_rp_sweep(const ExperimentConfig& config, ExperimentKind kind);
ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentKind kind);

/// Mean and variance per (experiment, sigma_w, T) over cells that are ok().
std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

/// Columns: experiment_id, seed, T, eta, sigma_w, solver_status, norm_K, K_<r>_<c>..., norm_X0Y,
/// norm_U0Y, norm_X1Y, objective, rp_bound, sigma_min_DT, wall_time. Throws on empty input.
void emit_csv(const std::vector<ExperimentRecord>& records, std::ostream& out);
void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path);
void emit_summary_csv(const std::vector<SummaryRow>& summary, const std::string& path);

/// norm_K.svg (mean +- std vs T) and variable_norms.svg (X0Y - I, U0Y, X1Y vs T).
void emit_plots(const std::vector<SummaryRow>& summary, const std::string& dir);

/// Writes records.csv, summary.csv, the plots, oracle-report.json and run-manifest.json.
void write_outputs(const ExperimentResult& result, const std::string& dir);

}  // namespace ddd
