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

#include "ddd/lti_lab.hpp"
#include "ddd/rng.hpp"

namespace ddd::testing {

inline Matrix random_matrix(NormalStream& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Matrix M(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) M(r, c) = scale * rng.next();
  return M;
}

/// Random plant with spectral radius near 0.9, Q = R = I.
inline PlantConfig random_plant(std::uint64_t seed, int n, int m, double sigma_w) {
  NormalStream rng(seed);
  PlantConfig p;
  p.system.A = random_matrix(rng, n, n);
  const double rho = spectral_radius(p.system.A);
  if (rho > 0.0) p.system.A *= 0.9 / rho;
  p.system.B = random_matrix(rng, n, m);
  p.system.sigma_u = 1.0;
  p.system.sigma_w = sigma_w;
  p.weights.Q = Matrix::Identity(n, n);
  p.weights.R = Matrix::Identity(m, m);
  return p;
}

inline PlantConfig paper_plant(double sigma_w) {
  PlantConfig p{paper41(), paper_weights()};
  p.system.sigma_w = sigma_w;
  return p;
}

inline double max_abs(const Matrix& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

}  // namespace ddd::testing
