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

#include "ddd/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "ddd/analytic_oracle.hpp"
#include "ddd/error.hpp"
#include "ddd/excitation.hpp"
#include "ddd/lqr_exact.hpp"
#include "ddd/rng.hpp"
#include "plant_json.hpp"

#ifndef DDD_LQR_LAB_VERSION
#define DDD_LQR_LAB_VERSION "unknown"
#endif

namespace ddd {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Ce:
      return "ce";
    case ExperimentKind::RpFixed:
      return "rp-fixed";
    case ExperimentKind::RpGrowing:
      return "rp-growing";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  if (name == "ce") return ExperimentKind::Ce;
  if (name == "rp-fixed") return ExperimentKind::RpFixed;
  if (name == "rp-growing") return ExperimentKind::RpGrowing;
  fail(ErrorKind::InvalidArgument, "unknown experiment '" + name + "' (expected ce, rp-fixed or rp-growing)");
}

void ExperimentConfig::validate() const {
  if (T_grid.empty()) fail(ErrorKind::Config, "T_grid must not be empty");
  for (std::size_t i = 0; i < T_grid.size(); ++i) {
    if (T_grid[i] < 1) fail(ErrorKind::Config, "T_grid entries must be positive");
    if (i > 0 && T_grid[i] <= T_grid[i - 1]) fail(ErrorKind::Config, "T_grid must be strictly increasing");
  }
  if (n_runs < 1) fail(ErrorKind::Config, "n_runs must be >= 1");
  if (!(eta_policy.value > 0.0)) fail(ErrorKind::Config, "eta_policy value/slope must be positive");
  if (!(solver.gap_tol > 0.0) || !(solver.feas_tol > 0.0) || solver.max_iter < 1)
    fail(ErrorKind::Config, "solver tolerances must be positive and max_iter >= 1");
  if (ce_horizon < 1) fail(ErrorKind::Config, "ce_horizon must be positive");
  if (!(ce_sigma_w > 0.0)) fail(ErrorKind::Config, "ce_sigma_w must be positive");
  if (rho < 0.0) fail(ErrorKind::Config, "rho must be nonnegative");
  if (jobs < 1) fail(ErrorKind::Config, "jobs must be >= 1");
  plant.system.validate();
  plant.weights.validate(plant.system.n(), plant.system.m());
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig c;
  if (kind == ExperimentKind::RpGrowing) {
    c.eta_policy = {EtaPolicy::Kind::Linear, 10.0};
  } else if (kind == ExperimentKind::RpFixed) {
    c.noiseless_branch = true;
  }
  return c;
}

namespace {

using detail::json;

template <typename T>
T get_as(const json& v, const std::string& key, const std::string& where) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::Config, where + ": key '" + key + "' has the wrong type");
  }
}

int get_int(const json& v, const std::string& key, const std::string& where) {
  if (!v.is_number_integer()) fail(ErrorKind::Config, where + ": key '" + key + "' must be an integer");
  return v.get<int>();
}

ExperimentConfig config_from_json(const json& j, ExperimentKind kind, const std::string& where) {
  if (!j.is_object()) fail(ErrorKind::Config, where + ": top level must be an object");
  ExperimentConfig c = default_config(kind);
  detail::PlantParser plant(where);
  bool any_plant = false;
  for (const auto& [key, v] : j.items()) {
    if (plant.accept(key, v)) {
      any_plant = true;
    } else if (key == "T_grid") {
      if (!v.is_array()) fail(ErrorKind::Config, where + ": key 'T_grid' must be an array");
      c.T_grid.clear();
      for (const auto& t : v) c.T_grid.push_back(get_int(t, key, where));
    } else if (key == "eta_policy") {
      if (!v.is_object() || !v.contains("kind")) fail(ErrorKind::Config, where + ": key 'eta_policy' needs a 'kind'");
      const auto k = get_as<std::string>(v.at("kind"), "eta_policy.kind", where);
      for (const auto& [sub, sv] : v.items()) {
        if (sub == "kind") continue;
        const bool allowed = (k == "fixed" && sub == "value") || (k == "linear" && sub == "slope");
        if (!allowed) fail(ErrorKind::Config, where + ": unknown key 'eta_policy." + sub + "'");
        c.eta_policy.value = detail::number_from_json(sv, "eta_policy." + sub);
      }
      if (k == "fixed") {
        c.eta_policy.kind = EtaPolicy::Kind::Fixed;
        if (!v.contains("value")) c.eta_policy.value = 1.0;
      } else if (k == "linear") {
        c.eta_policy.kind = EtaPolicy::Kind::Linear;
        if (!v.contains("slope")) c.eta_policy.value = 10.0;
      } else {
        fail(ErrorKind::Config, where + ": eta_policy.kind must be 'fixed' or 'linear'");
      }
    } else if (key == "n_runs") {
      c.n_runs = get_int(v, key, where);
    } else if (key == "base_seed") {
      if (!v.is_number_unsigned()) fail(ErrorKind::Config, where + ": key 'base_seed' must be a nonnegative integer");
      c.base_seed = v.get<std::uint64_t>();
    } else if (key == "solver") {
      if (!v.is_object()) fail(ErrorKind::Config, where + ": key 'solver' must be an object");
      for (const auto& [sub, sv] : v.items()) {
        if (sub == "gap_tol") c.solver.gap_tol = detail::number_from_json(sv, "solver.gap_tol");
        else if (sub == "feas_tol") c.solver.feas_tol = detail::number_from_json(sv, "solver.feas_tol");
        else if (sub == "max_iter") c.solver.max_iter = get_int(sv, "solver.max_iter", where);
        else fail(ErrorKind::Config, where + ": unknown key 'solver." + sub + "'");
      }
    } else if (key == "output_dir") {
      c.output_dir = get_as<std::string>(v, key, where);
    } else if (key == "noise_mode") {
      try {
        c.noise_mode = noise_mode_from_string(get_as<std::string>(v, key, where));
      } catch (const Error& e) {
        fail(ErrorKind::Config, where + ": key 'noise_mode': " + e.what());
      }
    } else if (key == "rp_form") {
      try {
        c.rp_form = rp_form_from_string(get_as<std::string>(v, key, where));
      } catch (const Error& e) {
        fail(ErrorKind::Config, where + ": key 'rp_form': " + e.what());
      }
    } else if (key == "noiseless_branch") {
      c.noiseless_branch = get_as<bool>(v, key, where);
    } else if (key == "tolerate_failures") {
      c.tolerate_failures = get_as<bool>(v, key, where);
    } else if (key == "record_wall_time") {
      c.record_wall_time = get_as<bool>(v, key, where);
    } else if (key == "ce_horizon") {
      c.ce_horizon = get_int(v, key, where);
    } else if (key == "ce_sigma_w") {
      c.ce_sigma_w = detail::number_from_json(v, key);
    } else if (key == "rho") {
      c.rho = detail::number_from_json(v, key);
    } else if (key == "jobs") {
      c.jobs = get_int(v, key, where);
    } else {
      fail(ErrorKind::Config, where + ": unknown key '" + key + "'");
    }
  }
  if (any_plant) c.plant = plant.finish();
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorKind::Config, where + ": " + e.what());
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["A"] = detail::matrix_to_json(c.plant.system.A);
  j["B"] = detail::matrix_to_json(c.plant.system.B);
  j["Q"] = detail::matrix_to_json(c.plant.weights.Q);
  j["R"] = detail::matrix_to_json(c.plant.weights.R);
  j["sigma_u"] = c.plant.system.sigma_u;
  j["sigma_w"] = c.plant.system.sigma_w;
  j["sigma_x0"] = c.plant.system.sigma_x0;
  j["sigma_delta"] = c.plant.system.sigma_delta;
  j["T_grid"] = c.T_grid;
  if (c.eta_policy.kind == EtaPolicy::Kind::Fixed) j["eta_policy"] = {{"kind", "fixed"}, {"value", c.eta_policy.value}};
  else j["eta_policy"] = {{"kind", "linear"}, {"slope", c.eta_policy.value}};
  j["n_runs"] = c.n_runs;
  j["base_seed"] = c.base_seed;
  j["solver"] = {{"gap_tol", c.solver.gap_tol}, {"feas_tol", c.solver.feas_tol}, {"max_iter", c.solver.max_iter}};
  j["output_dir"] = c.output_dir;
  j["noise_mode"] = to_string(c.noise_mode);
  j["rp_form"] = to_string(c.rp_form);
  j["noiseless_branch"] = c.noiseless_branch;
  j["tolerate_failures"] = c.tolerate_failures;
  j["record_wall_time"] = c.record_wall_time;
  j["ce_horizon"] = c.ce_horizon;
  j["ce_sigma_w"] = c.ce_sigma_w;
  j["rho"] = c.rho;
  j["jobs"] = c.jobs;
  return j;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double inf_norm_diff(const Matrix& a, const Matrix& b) {
  if (a.size() == 0 || b.size() == 0 || a.rows() != b.rows() || a.cols() != b.cols())
    return std::numeric_limits<double>::quiet_NaN();
  return (a - b).cwiseAbs().maxCoeff();
}

struct Cell {
  int T;
  int run;
  double sigma_w;
};

std::vector<ExperimentRecord> run_cells(const ExperimentConfig& config, ExperimentKind kind,
                                        const std::vector<Cell>& cells) {
  std::vector<ExperimentRecord> out(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        out[i] = run_cell(config, kind, cells[i].T, cells[i].run, cells[i].sigma_w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(cells.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::sort(out.begin(), out.end(), [](const ExperimentRecord& a, const ExperimentRecord& b) {
    return std::tie(a.T, a.seed, a.sigma_w) < std::tie(b.T, b.seed, b.sigma_w);
  });
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, ExperimentKind kind, const std::string& where) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, where + ": " + e.what());
  }
  return config_from_json(j, kind, where);
}

ExperimentConfig parse_config(const std::string& path, ExperimentKind kind) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), kind, path);
}

bool ExperimentResult::all_ok() const {
  if (records.empty()) return false;
  return std::all_of(records.begin(), records.end(), [](const ExperimentRecord& r) { return r.ok(); });
}

ExperimentRecord run_cell(const ExperimentConfig& config, ExperimentKind kind, int T, int run_index, double sigma_w) {
  const auto start = std::chrono::steady_clock::now();
  LtiSystem system = config.plant.system;
  system.sigma_w = sigma_w;
  const LqrWeights& weights = config.plant.weights;
  const bool ce = kind == ExperimentKind::Ce;

  ExperimentRecord r;
  r.experiment_id = to_string(kind);
  r.seed = cell_seed(config.base_seed, T, run_index);
  r.run_index = run_index;
  r.T = T;
  r.sigma_w = sigma_w;
  r.eta = ce ? 0.0 : config.eta_policy.eta(T);

  const TrajectoryData data = simulate(system, T, r.seed, config.noise_mode);
  const DddProblem problem = ce ? build_ce(data, weights) : build_rp(data, weights, r.eta, config.rp_form);
  const DddSolution sol = solve_problem(problem, data, config.solver);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.solver_status = sol.solver.status;
  r.gain_recovered = sol.gain_recovered;
  r.objective = sol.objective;
  r.K = sol.K;
  r.norm_K = sol.gain_recovered ? sigma_max(sol.K) : nan;
  r.norm_X0Y = sol.diagnostics.norm_X0Y;
  r.norm_X0Y_minus_I = sol.diagnostics.norm_X0Y_minus_I;
  r.norm_U0Y = sol.diagnostics.norm_U0Y;
  r.norm_X1Y = sol.diagnostics.norm_X1Y;
  r.closed_loop_radius = sol.gain_recovered ? is_stabilizing(system, sol.K).spectral_radius : nan;

  const Matrix D = combined_matrix(data);
  r.rank_DT = numerical_rank(D);
  r.sigma_min_DT = sigma_min(D);
  const bool full_rank = r.rank_DT == D.rows();
  r.rp_bound = ce ? nan : (full_rank ? rp_gain_bound(data, weights, r.eta) : std::numeric_limits<double>::infinity());

  try {
    r.K_predicted = ce_prediction(data, weights).K;
  } catch (const Error&) {
    r.K_predicted = Matrix();
  }
  r.psi_gap = r.lemma1_lambda_max = nan;
  if (sol.Y.size() > 0 && sol.gain_recovered) {
    const PsiReport psi = psi_matrix(data, sol.Y);
    r.psi_gap = (psi.Psi - system.A * system.A.transpose()).norm();
    r.lemma1_lambda_max = lemma1_condition(psi.Psi).lambda_max;
  }
  r.rp_bound_theoretical = r.rho_used = nan;
  if (!ce && sigma_w > 0.0 && config.noise_mode == NoiseMode::Process && T > data.n()) {
    double rho = config.rho;
    if (rho == 0.0) {
      try {
        rho = empirical_rho(data.X0, stacked_input(data, system, InputScaling::Isotropic));
      } catch (const Error&) {
        rho = 0.0;
      }
    }
    if (rho > 0.0) {
      r.rho_used = rho;
      r.rp_bound_theoretical = rp_bound_theoretical(T, r.eta, weights, system, rho).bound;
    }
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.wall_time = config.record_wall_time ? elapsed : nan;
  return r;
}

ExperimentResult run_ce_experiment(const ExperimentConfig& config) {
  config.validate();
  ExperimentResult res;
  res.kind = ExperimentKind::Ce;
  res.config = config;
  res.K_lqr = solve_dare(config.plant.system, config.plant.weights).K;
  std::vector<Cell> cells;
  for (int r = 0; r < config.n_runs; ++r) {
    cells.push_back({config.ce_horizon, r, 0.0});
    cells.push_back({config.ce_horizon, r, config.ce_sigma_w});
  }
  res.records = run_cells(config, ExperimentKind::Ce, cells);
  res.summary = summarize(res.records);
  return res;
}

ExperimentResult run_rp_sweep(const ExperimentConfig& config, ExperimentKind kind) {
  if (kind == ExperimentKind::Ce) fail(ErrorKind::InvalidArgument, "run_rp_sweep needs an RP experiment kind");
  config.validate();
  ExperimentResult res;
  res.kind = kind;
  res.config = config;
  res.K_lqr = solve_dare(config.plant.system, config.plant.weights).K;
  const double sw = config.plant.system.sigma_w;
  std::vector<Cell> cells;
  for (int T : config.T_grid)
    for (int r = 0; r < config.n_runs; ++r) {
      cells.push_back({T, r, sw});
      if (config.noiseless_branch && sw != 0.0) cells.push_back({T, r, 0.0});
    }
  res.records = run_cells(config, kind, cells);
  res.summary = summarize(res.records);
  return res;
}

ExperimentResult run_experiment(const ExperimentConfig& config, ExperimentKind kind) {
  return kind == ExperimentKind::Ce ? run_ce_experiment(config) : run_rp_sweep(config, kind);
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<std::string, double, int>;
  std::map<Key, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) groups[{r.experiment_id, r.sigma_w, r.T}].push_back(&r);
  std::vector<SummaryRow> out;
  for (const auto& [key, group] : groups) {
    SummaryRow s;
    std::tie(s.experiment_id, s.sigma_w, s.T) = key;
    s.eta = group.front()->eta;
    s.n_total = static_cast<int>(group.size());
    std::vector<const ExperimentRecord*> ok;
    for (const auto* r : group)
      if (r->ok()) ok.push_back(r);
    s.n_ok = static_cast<int>(ok.size());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto mean = [&](auto field) {
      if (ok.empty()) return nan;
      double acc = 0.0;
      for (const auto* r : ok) acc += field(*r);
      return acc / static_cast<double>(ok.size());
    };
    s.mean_norm_K = mean([](const ExperimentRecord& r) { return r.norm_K; });
    s.var_norm_K = ok.empty() ? nan : 0.0;
    if (ok.size() > 1) {
      double acc = 0.0;
      for (const auto* r : ok) acc += (r->norm_K - s.mean_norm_K) * (r->norm_K - s.mean_norm_K);
      s.var_norm_K = acc / static_cast<double>(ok.size() - 1);
    }
    s.mean_norm_X0Y = mean([](const ExperimentRecord& r) { return r.norm_X0Y; });
    s.mean_norm_X0Y_minus_I = mean([](const ExperimentRecord& r) { return r.norm_X0Y_minus_I; });
    s.mean_norm_U0Y = mean([](const ExperimentRecord& r) { return r.norm_U0Y; });
    s.mean_norm_X1Y = mean([](const ExperimentRecord& r) { return r.norm_X1Y; });
    s.mean_objective = mean([](const ExperimentRecord& r) { return r.objective; });
    s.mean_rp_bound = mean([](const ExperimentRecord& r) { return r.rp_bound; });
    out.push_back(s);
  }
  return out;
}

void emit_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
  if (records.empty()) fail(ErrorKind::InvalidArgument, "emit_csv: no records");
  Eigen::Index m = 0, n = 0;
  for (const auto& r : records)
    if (r.K.size() > 0) {
      m = r.K.rows();
      n = r.K.cols();
      break;
    }
  out << "experiment_id,seed,T,eta,sigma_w,solver_status,norm_K";
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out << ",K_" << i + 1 << '_' << j + 1;
  out << ",norm_X0Y,norm_U0Y,norm_X1Y,objective,rp_bound,sigma_min_DT,wall_time\n";
  for (const auto& r : records) {
    out << r.experiment_id << ',' << r.seed << ',' << r.T << ',' << fmt(r.eta) << ',' << fmt(r.sigma_w) << ','
        << to_string(r.solver_status) << ',' << fmt(r.norm_K);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        out << ',' << (r.K.size() > 0 ? fmt(r.K(i, j)) : std::string("NA"));
    out << ',' << fmt(r.norm_X0Y) << ',' << fmt(r.norm_U0Y) << ',' << fmt(r.norm_X1Y) << ',' << fmt(r.objective)
        << ',' << fmt(r.rp_bound) << ',' << fmt(r.sigma_min_DT) << ',' << fmt(r.wall_time) << '\n';
  }
}

void emit_csv(const std::vector<ExperimentRecord>& records, const std::string& path) {
  if (records.empty()) fail(ErrorKind::InvalidArgument, "emit_csv: no records");
  std::ostringstream buf;
  emit_csv(records, buf);
  auto out = open_out(path);
  out << buf.str();
}

void emit_summary_csv(const std::vector<SummaryRow>& summary, const std::string& path) {
  if (summary.empty()) fail(ErrorKind::InvalidArgument, "emit_summary_csv: empty summary");
  auto out = open_out(path);
  out << "experiment_id,sigma_w,T,eta,n_total,n_ok,mean_norm_K,var_norm_K,mean_norm_X0Y,mean_norm_X0Y_minus_I,"
         "mean_norm_U0Y,mean_norm_X1Y,mean_objective,mean_rp_bound\n";
  for (const auto& s : summary)
    out << s.experiment_id << ',' << fmt(s.sigma_w) << ',' << s.T << ',' << fmt(s.eta) << ',' << s.n_total << ','
        << s.n_ok << ',' << fmt(s.mean_norm_K) << ',' << fmt(s.var_norm_K) << ',' << fmt(s.mean_norm_X0Y) << ','
        << fmt(s.mean_norm_X0Y_minus_I) << ',' << fmt(s.mean_norm_U0Y) << ',' << fmt(s.mean_norm_X1Y) << ','
        << fmt(s.mean_objective) << ',' << fmt(s.mean_rp_bound) << '\n';
}

namespace {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> err;  ///< empty or one half-width per point
};

std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void write_line_chart(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
  const double W = 640, H = 420, left = 70, right = 170, top = 40, bottom = 50;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymax = 0.0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymax = std::max(ymax, s.y[i] + (s.err.empty() || !std::isfinite(s.err[i]) ? 0.0 : s.err[i]));
    }
  if (!std::isfinite(xmin)) xmin = 0, xmax = 1;
  if (xmax == xmin) xmax = xmin + 1;
  if (!(ymax > 0.0)) ymax = 1.0;
  ymax *= 1.1;
  const double pw = W - left - right, ph = H - top - bottom;
  auto px = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
  auto py = [&](double y) { return top + ph - y / ymax * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

  auto out = open_out(path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 - right / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
      << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = ymax * k / 5.0;
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << svg_num(py(v)) << "\" x2=\"" << left << "\" y2=\""
        << svg_num(py(v)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << svg_num(py(v) + 4) << "\" text-anchor=\"end\">" << tick_label(v)
        << "</text>\n";
  }
  std::vector<double> xticks;
  for (const auto& s : series) xticks.insert(xticks.end(), s.x.begin(), s.x.end());
  std::sort(xticks.begin(), xticks.end());
  xticks.erase(std::unique(xticks.begin(), xticks.end()), xticks.end());
  for (double x : xticks) {
    out << "<line x1=\"" << svg_num(px(x)) << "\" y1=\"" << top + ph << "\" x2=\"" << svg_num(px(x)) << "\" y2=\""
        << top + ph + 4 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << svg_num(px(x)) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">"
        << tick_label(x) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
  out << "<text transform=\"translate(16," << top + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << ylabel
      << "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % 6];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      points += svg_num(px(s.x[i])) + "," + svg_num(py(s.y[i])) + " ";
      if (!s.err.empty() && std::isfinite(s.err[i]) && s.err[i] > 0.0) {
        out << "<line x1=\"" << svg_num(px(s.x[i])) << "\" y1=\"" << svg_num(py(std::max(0.0, s.y[i] - s.err[i])))
            << "\" x2=\"" << svg_num(px(s.x[i])) << "\" y2=\"" << svg_num(py(s.y[i] + s.err[i])) << "\" stroke=\""
            << color << "\"/>\n";
      }
      out << "<circle cx=\"" << svg_num(px(s.x[i])) << "\" cy=\"" << svg_num(py(s.y[i])) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << points
        << "\"/>\n";
    const double ly = top + 10 + 18.0 * static_cast<double>(si);
    out << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 36 << "\" y=\"" << ly + 4 << "\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
}

std::string series_label(const SummaryRow& s) { return s.experiment_id + " sigma_w=" + tick_label(s.sigma_w); }

}  // namespace

void emit_plots(const std::vector<SummaryRow>& summary, const std::string& dir) {
  if (summary.empty()) fail(ErrorKind::InvalidArgument, "emit_plots: empty summary");
  std::map<std::string, Series> gains;
  std::vector<std::string> order;
  for (const auto& s : summary) {
    const auto label = series_label(s);
    if (!gains.count(label)) order.push_back(label);
    auto& g = gains[label];
    g.name = label;
    g.x.push_back(s.T);
    g.y.push_back(s.mean_norm_K);
    g.err.push_back(std::sqrt(s.var_norm_K));
  }
  std::vector<Series> gain_series;
  for (const auto& l : order) gain_series.push_back(gains[l]);
  write_line_chart(dir + "/norm_K.svg", "Mean spectral norm of the gain (+- std)", "T", "||K||", gain_series);

  std::vector<Series> norm_series;
  for (const auto& l : order) {
    Series a{"||X0Y - I|| " + l, {}, {}, {}}, b{"||U0Y|| " + l, {}, {}, {}}, c{"||X1Y|| " + l, {}, {}, {}};
    for (const auto& s : summary) {
      if (series_label(s) != l) continue;
      a.x.push_back(s.T);
      a.y.push_back(s.mean_norm_X0Y_minus_I);
      b.x.push_back(s.T);
      b.y.push_back(s.mean_norm_U0Y);
      c.x.push_back(s.T);
      c.y.push_back(s.mean_norm_X1Y);
    }
    norm_series.push_back(a);
    norm_series.push_back(b);
    norm_series.push_back(c);
  }
  write_line_chart(dir + "/variable_norms.svg", "Mean norms of the optimal variables", "T", "spectral norm",
                   norm_series);
}

void write_outputs(const ExperimentResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create output directory '" + dir + "': " + ec.message());
  emit_csv(result.records, dir + "/records.csv");
  emit_summary_csv(result.summary, dir + "/summary.csv");
  emit_plots(result.summary, dir);

  json cells = json::array();
  for (const auto& r : result.records) {
    json c;
    c["seed"] = r.seed;
    c["run_index"] = r.run_index;
    c["T"] = r.T;
    c["eta"] = r.eta;
    c["sigma_w"] = r.sigma_w;
    c["solver_status"] = to_string(r.solver_status);
    c["rank_DT"] = r.rank_DT;
    c["K"] = r.K.size() ? detail::matrix_to_json(r.K) : json();
    c["K_predicted"] = r.K_predicted.size() ? detail::matrix_to_json(r.K_predicted) : json();
    c["K_minus_K_predicted_inf"] = inf_norm_diff(r.K, r.K_predicted);
    c["K_minus_K_lqr_inf"] = inf_norm_diff(r.K, result.K_lqr);
    c["closed_loop_spectral_radius"] = r.closed_loop_radius;
    c["norm_X0Y_minus_I"] = r.norm_X0Y_minus_I;
    c["psi_gap"] = r.psi_gap;
    c["lemma1_lambda_max"] = r.lemma1_lambda_max;
    c["rp_bound"] = r.rp_bound;
    c["rp_bound_theoretical"] = r.rp_bound_theoretical;
    c["rho_used"] = r.rho_used;
    cells.push_back(std::move(c));
  }
  json oracle;
  oracle["experiment"] = to_string(result.kind);
  oracle["K_lqr"] = detail::matrix_to_json(result.K_lqr);
  oracle["ce_objective_reference"] = result.config.plant.weights.Q.trace();
  oracle["cells"] = std::move(cells);
  open_out(dir + "/oracle-report.json") << oracle.dump(1) << '\n';

  std::map<std::string, int> counts;
  for (const auto& r : result.records) ++counts[to_string(r.solver_status)];
  json manifest;
  manifest["tool"] = "ddd-lqr-lab";
  manifest["version"] = DDD_LQR_LAB_VERSION;
  manifest["experiment"] = to_string(result.kind);
  manifest["config"] = config_to_json(result.config);
  manifest["tolerances"] = {{"solver_gap_tol", result.config.solver.gap_tol},
                            {"solver_feas_tol", result.config.solver.feas_tol},
                            {"solver_max_iter", result.config.solver.max_iter},
                            {"dare_tol", DareOptions{}.tol},
                            {"rank_tolerance", "max(rows, cols) * sigma_max * eps * 100"}};
  manifest["versions"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                        "." + std::to_string(EIGEN_MINOR_VERSION)},
                          {"compiler", __VERSION__},
                          {"cxx_standard", static_cast<long>(__cplusplus)}};
  manifest["K_lqr"] = detail::matrix_to_json(result.K_lqr);
  manifest["records"] = result.records.size();
  manifest["status_counts"] = counts;
  manifest["all_ok"] = result.all_ok();
  manifest["outputs"] = {"records.csv", "summary.csv", "norm_K.svg", "variable_norms.svg", "oracle-report.json"};
  open_out(dir + "/run-manifest.json") << manifest.dump(1) << '\n';
}

}  // namespace ddd
