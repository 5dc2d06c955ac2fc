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

#include "ddd/linalg.hpp"

namespace ddd {

/// Ground-truth plant x+ = A x + B u + w driven by Gaussian input and noise.
struct LtiSystem {
  Matrix A;
  Matrix B;
  double sigma_u = 1.0;
  double sigma_w = 0.0;
  double sigma_x0 = 0.0;
  double sigma_delta = 0.0;

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index m() const { return B.cols(); }

  /// Throws Error(DimensionMismatch / InvalidArgument) on a malformed plant.
  void validate() const;
};

struct LqrWeights {
  Matrix Q;
  Matrix R;

  /// Requires square symmetric Q (n x n) and R (m x m) with positive spectra.
  void validate(Eigen::Index n, Eigen::Index m) const;
};

enum class NoiseMode { Process, Measurement };

const char* to_string(NoiseMode mode);
NoiseMode noise_mode_from_string(const std::string& name);

/// Data matrices over horizon T. Columns are time steps 0..T-1 (X1 is shifted by one).
struct TrajectoryData {
  Matrix X0;
  Matrix U0;
  Matrix X1;
  Matrix W0;
  int T = 0;
  NoiseMode noise_mode = NoiseMode::Process;
  std::uint64_t seed = 0;

  Eigen::Index n() const { return X0.rows(); }
  Eigen::Index m() const { return U0.rows(); }
};

/// Simulates T steps from x0 ~ N(0, sigma_x0^2 I).
///
/// Per step the stream yields u_t (m draws), then w_t (n draws), then the
/// measurement perturbation delta_{t} (n draws); x0 takes the first n draws,
/// and a final delta for x_T closes the trajectory. Every draw is consumed
/// regardless of the configured scales, so two systems that differ only in
/// sigma_w see the same input sequence for the same seed.
TrajectoryData simulate(const LtiSystem& system, int T, std::uint64_t seed, NoiseMode mode = NoiseMode::Process);

/// D_T = [X0; U0; X1].
Matrix combined_matrix(const TrajectoryData& data);

enum class InputScaling { Plain, Isotropic };

/// Plain: V0 = [U0; W0]. Isotropic: Z0 = [U0; (sigma_u / sigma_w) W0].
Matrix stacked_input(const TrajectoryData& data, const LtiSystem& system, InputScaling scaling);

/// Kalman rank test on [B, AB, ..., A^{n-1} B].
bool controllability_check(const LtiSystem& system);

/// Second-order single-input benchmark plant with rho(A) = 1.01.
///
/// The input matrix uses b2 = 0.1740, which reproduces the reference LQR gain
/// [-0.7112, -0.2046] under Q = I, R = 1. paper41_printed() keeps b2 = 0.3726.
LtiSystem paper41();
LtiSystem paper41_printed();
LqrWeights paper_weights();

/// Plant plus LQR weights as read from a JSON config (`A`, `B`, `Q`, `R`,
/// `sigma_u`, `sigma_w`, `sigma_x0`, `sigma_delta`, optional `preset`).
struct PlantConfig {
  LtiSystem system;
  LqrWeights weights;
};

PlantConfig load_plant_config(const std::string& path);

/// CSV with header `t,x_1..x_n,u_1..u_m,w_1..w_n`; rows t = 0..T, the final
/// row carries x_T only (input and noise fields empty).
void write_trajectory_csv(const TrajectoryData& data, std::ostream& out);
void write_trajectory_csv(const TrajectoryData& data, const std::string& path);
TrajectoryData read_trajectory_csv(const std::string& path);

}  // namespace ddd
