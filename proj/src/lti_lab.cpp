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

#include "ddd/lti_lab.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "ddd/error.hpp"
#include "ddd/rng.hpp"
#include "plant_json.hpp"

namespace ddd {

namespace {

constexpr double kWeightEigTol = 1e-12;

void require_positive_definite(const Matrix& m, const char* name) {
  if (m.rows() != m.cols()) fail(ErrorKind::DimensionMismatch, std::string(name) + " must be square");
  if (!is_symmetric(m, 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())))
    fail(ErrorKind::InvalidArgument, std::string(name) + " must be symmetric");
  if (lambda_min_sym(m) <= kWeightEigTol) fail(ErrorKind::InvalidArgument, std::string(name) + " must be positive definite");
}

}  // namespace

void LtiSystem::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) fail(ErrorKind::DimensionMismatch, "A must be square and nonempty");
  if (B.rows() != A.rows() || B.cols() == 0) fail(ErrorKind::DimensionMismatch, "B must have as many rows as A");
  if (!(sigma_u > 0.0)) fail(ErrorKind::InvalidArgument, "sigma_u must be positive");
  if (sigma_w < 0.0 || sigma_x0 < 0.0 || sigma_delta < 0.0)
    fail(ErrorKind::InvalidArgument, "noise scales must be nonnegative");
}

void LqrWeights::validate(Eigen::Index n, Eigen::Index m) const {
  if (Q.rows() != n) fail(ErrorKind::DimensionMismatch, "Q must be n x n");
  if (R.rows() != m) fail(ErrorKind::DimensionMismatch, "R must be m x m");
  require_positive_definite(Q, "Q");
  require_positive_definite(R, "R");
}

const char* to_string(NoiseMode mode) { return mode == NoiseMode::Process ? "process" : "measurement"; }

NoiseMode noise_mode_from_string(const std::string& name) {
  if (name == "process") return NoiseMode::Process;
  if (name == "measurement") return NoiseMode::Measurement;
  fail(ErrorKind::InvalidArgument, "unknown noise mode '" + name + "' (expected process|measurement)");
}

TrajectoryData simulate(const LtiSystem& system, int T, std::uint64_t seed, NoiseMode mode) {
  system.validate();
  if (T < 1) fail(ErrorKind::InvalidArgument, "horizon T must be at least 1");
  const Eigen::Index n = system.n();
  const Eigen::Index m = system.m();
  const bool measured = mode == NoiseMode::Measurement;

  NormalStream rng(seed);
  auto draw = [&rng](Eigen::Index size, double scale) {
    Vector v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = scale * rng.next();
    return v;
  };

  TrajectoryData data;
  data.T = T;
  data.noise_mode = mode;
  data.seed = seed;
  data.X0.resize(n, T);
  data.U0.resize(m, T);
  data.X1.resize(n, T);
  data.W0 = Matrix::Zero(n, T);

  const double delta_scale = measured ? system.sigma_delta : 0.0;
  Vector x = draw(n, system.sigma_x0);
  for (int t = 0; t < T; ++t) {
    const Vector u = draw(m, system.sigma_u);
    const Vector w = draw(n, system.sigma_w);
    const Vector delta = draw(n, delta_scale);
    data.X0.col(t) = x + delta;
    data.U0.col(t) = u;
    if (measured) {
      x = system.A * x + system.B * u;
    } else {
      data.W0.col(t) = w;
      x = system.A * x + system.B * u + w;
    }
  }
  const Vector final_delta = draw(n, delta_scale);
  if (T > 1) data.X1.leftCols(T - 1) = data.X0.rightCols(T - 1);
  data.X1.col(T - 1) = x + final_delta;
  return data;
}

Matrix combined_matrix(const TrajectoryData& data) {
  const Eigen::Index n = data.n();
  const Eigen::Index m = data.m();
  Matrix d(2 * n + m, data.T);
  d << data.X0, data.U0, data.X1;
  return d;
}

Matrix stacked_input(const TrajectoryData& data, const LtiSystem& system, InputScaling scaling) {
  if (data.noise_mode != NoiseMode::Process)
    fail(ErrorKind::InvalidArgument, "stacked_input requires process-noise data");
  double ratio = 1.0;
  if (scaling == InputScaling::Isotropic) {
    if (!(system.sigma_w > 0.0)) fail(ErrorKind::InvalidArgument, "isotropic scaling requires sigma_w > 0");
    ratio = system.sigma_u / system.sigma_w;
  }
  Matrix v(data.m() + data.n(), data.T);
  v << data.U0, ratio * data.W0;
  return v;
}

bool controllability_check(const LtiSystem& system) {
  system.validate();
  const Eigen::Index n = system.n();
  const Eigen::Index m = system.m();
  Matrix ctrb(n, n * m);
  Matrix block = system.B;
  for (Eigen::Index k = 0; k < n; ++k) {
    ctrb.middleCols(k * m, m) = block;
    block = system.A * block;
  }
  return numerical_rank(ctrb) == n;
}

LtiSystem paper41() {
  LtiSystem s = paper41_printed();
  s.B(1, 0) = 0.1740;
  return s;
}

LtiSystem paper41_printed() {
  LtiSystem s;
  s.A.resize(2, 2);
  s.A << 0.8878, 0.2232, 0.3491, 0.3726;
  s.B.resize(2, 1);
  s.B << -0.6808, 0.3726;
  s.sigma_u = 1.0;
  s.sigma_w = 0.0;
  return s;
}

LqrWeights paper_weights() { return {Matrix::Identity(2, 2), Matrix::Identity(1, 1)}; }

namespace detail {

bool PlantParser::accept(const std::string& key, const json& value) {
  if (key == "preset") {
    if (!value.is_string()) fail(ErrorKind::Config, where_ + ": key 'preset' must be a string");
    const auto preset = value.get<std::string>();
    if (preset == "paper41") {
      cfg_.system = paper41();
    } else if (preset == "paper41-printed") {
      cfg_.system = paper41_printed();
    } else {
      fail(ErrorKind::Config, where_ + ": unknown preset '" + preset + "' (expected paper41 or paper41-printed)");
    }
    have_plant_ = true;
  } else if (key == "weights") {
    if (!value.is_string() || value.get<std::string>() != "paperQR")
      fail(ErrorKind::Config, where_ + ": key 'weights' only accepts the preset \"paperQR\"");
    cfg_.weights = paper_weights();
    have_Q_ = have_R_ = true;
  } else if (key == "A") {
    cfg_.system.A = matrix_from_json(value, key);
    have_plant_ = custom_ = true;
  } else if (key == "B") {
    cfg_.system.B = matrix_from_json(value, key);
    custom_ = true;
  } else if (key == "Q") {
    cfg_.weights.Q = matrix_from_json(value, key);
    have_Q_ = true;
  } else if (key == "R") {
    cfg_.weights.R = matrix_from_json(value, key);
    have_R_ = true;
  } else if (key == "sigma_u") {
    cfg_.system.sigma_u = number_from_json(value, key);
  } else if (key == "sigma_w") {
    cfg_.system.sigma_w = number_from_json(value, key);
  } else if (key == "sigma_x0") {
    cfg_.system.sigma_x0 = number_from_json(value, key);
  } else if (key == "sigma_delta") {
    cfg_.system.sigma_delta = number_from_json(value, key);
  } else {
    return false;
  }
  return true;
}

PlantConfig PlantParser::finish() {
  if (!have_plant_) fail(ErrorKind::Config, where_ + ": either 'preset' or 'A'/'B' is required");
  auto& sys = cfg_.system;
  // A flat B on a multi-state plant is read as a column.
  if (sys.B.rows() == 1 && sys.A.rows() > 1 && sys.B.cols() == sys.A.rows()) sys.B.transposeInPlace();
  if (custom_) {
    if (!have_Q_) cfg_.weights.Q = Matrix::Identity(sys.n(), sys.n());
    if (!have_R_) cfg_.weights.R = Matrix::Identity(sys.m(), sys.m());
  }
  try {
    sys.validate();
    cfg_.weights.validate(sys.n(), sys.m());
  } catch (const Error& e) {
    fail(ErrorKind::Config, where_ + ": " + e.what());
  }
  return cfg_;
}

}  // namespace detail

PlantConfig load_plant_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config '" + path + "'");
  detail::json j;
  try {
    j = detail::json::parse(in);
  } catch (const detail::json::parse_error& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Config, path + ": top level must be an object");
  detail::PlantParser parser(path);
  for (const auto& [key, value] : j.items())
    if (!parser.accept(key, value)) fail(ErrorKind::Config, path + ": unknown key '" + key + "'");
  return parser.finish();
}

void write_trajectory_csv(const TrajectoryData& data, std::ostream& out) {
  const Eigen::Index n = data.n();
  const Eigen::Index m = data.m();
  out << "t";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u_" << i;
  for (Eigen::Index i = 1; i <= n; ++i) out << ",w_" << i;
  out << '\n';
  out << std::setprecision(17);
  for (int t = 0; t <= data.T; ++t) {
    out << t;
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << (t < data.T ? data.X0(i, t) : data.X1(i, data.T - 1));
    for (Eigen::Index i = 0; i < m; ++i) {
      out << ',';
      if (t < data.T) out << data.U0(i, t);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      out << ',';
      if (t < data.T) out << data.W0(i, t);
    }
    out << '\n';
  }
}

void write_trajectory_csv(const TrajectoryData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  write_trajectory_csv(data, out);
  if (!out) fail(ErrorKind::Io, "write failed for '" + path + "'");
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

TrajectoryData read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open trajectory '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::Io, path + ": empty file");
  const auto header = split_csv(line);
  Eigen::Index n = 0, m = 0, nw = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& h = header[c];
    if (h.rfind("x_", 0) == 0) ++n;
    else if (h.rfind("u_", 0) == 0) ++m;
    else if (h.rfind("w_", 0) == 0) ++nw;
    else fail(ErrorKind::Io, path + ": unexpected column '" + h + "'");
  }
  if (header.empty() || header[0] != "t" || n == 0 || m == 0 || nw != n)
    fail(ErrorKind::Io, path + ": header must be t,x_1..x_n,u_1..u_m,w_1..w_n");

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (static_cast<Eigen::Index>(fields.size()) != 1 + n + m + n)
      fail(ErrorKind::Io, path + ": row " + std::to_string(rows.size() + 2) + " has the wrong field count");
    rows.push_back(std::move(fields));
  }
  if (rows.size() < 2) fail(ErrorKind::Io, path + ": need at least two rows (x_0 and x_1)");
  const int T = static_cast<int>(rows.size()) - 1;

  auto number = [&path](const std::string& s, std::size_t row) {
    try {
      return std::stod(s);
    } catch (const std::exception&) {
      fail(ErrorKind::Io, path + ": bad number '" + s + "' in row " + std::to_string(row + 2));
    }
  };

  TrajectoryData data;
  data.T = T;
  data.X0.resize(n, T);
  data.X1.resize(n, T);
  data.U0.resize(m, T);
  data.W0.resize(n, T);
  for (int t = 0; t <= T; ++t) {
    const auto& f = rows[static_cast<std::size_t>(t)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = number(f[static_cast<std::size_t>(1 + i)], static_cast<std::size_t>(t));
      if (t < T) data.X0(i, t) = x;
      if (t > 0) data.X1(i, t - 1) = x;
    }
    if (t == T) continue;
    for (Eigen::Index i = 0; i < m; ++i)
      data.U0(i, t) = number(f[static_cast<std::size_t>(1 + n + i)], static_cast<std::size_t>(t));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = f[static_cast<std::size_t>(1 + n + m + i)];
      data.W0(i, t) = s.empty() ? 0.0 : number(s, static_cast<std::size_t>(t));
    }
  }
  return data;
}

}  // namespace ddd
