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

#include <iosfwd>
#include <string>
#include <vector>

#include "ddd/linalg.hpp"

namespace ddd {

/// One coefficient of an LMI block: F_var(row, col) = F_var(col, row) = value.
/// var == -1 addresses the constant term F0. Only the upper triangle
/// (row <= col) is stored; duplicates accumulate.
struct CoefficientEntry {
  int var = -1;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct LmiBlock {
  int size = 0;
  std::vector<CoefficientEntry> entries;

  void add(int var, int row, int col, double value);
};

/// minimize c'z subject to F0_j + sum_i z_i F_ij >= 0 for every block j.
struct LmiProblem {
  int num_vars = 0;
  Vector objective;
  std::vector<LmiBlock> blocks;

  /// Throws Error(InvalidArgument) on bad sizes, indices, or non-finite data.
  void validate() const;

  /// F0_j + sum_i z_i F_ij as a dense symmetric matrix.
  Matrix evaluate_block(std::size_t j, const Vector& z) const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, NumericalTrouble, IterLimit };

const char* to_string(SolveStatus status);

struct SolverSettings {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;  ///< per-iteration trace on stderr
};

struct SolveResult {
  Vector z;
  double objective_value = 0.0;
  double dual_objective = 0.0;
  SolveStatus status = SolveStatus::NumericalTrouble;
  double gap = 0.0;   ///< relative duality gap
  double feas = 0.0;  ///< worst block minimum eigenvalue at z (negative = violation)
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  std::vector<Matrix> dual_blocks;  ///< multipliers W_j >= 0, one per block
};

/// Homogeneous self-dual primal-dual interior-point method with Nesterov-Todd
/// scaling. Directions in the variable space that no block depends on are
/// projected out before the solve; the returned z has no component along them.
/// Statuses other than Optimal are returned, not thrown; malformed problems throw.
SolveResult solve(const LmiProblem& problem, const SolverSettings& settings = {});

/// Minimum eigenvalue of every block at z, computed independently of the solver.
std::vector<double> block_min_eigenvalues(const LmiProblem& problem, const Vector& z);

/// JSON with keys num_vars, c, blocks[].size, blocks[].entries as [var, row, col, value].
void write_problem_json(const LmiProblem& problem, std::ostream& out);
void write_problem_json(const LmiProblem& problem, const std::string& path);
LmiProblem read_problem_json(std::istream& in);
LmiProblem read_problem_json(const std::string& path);

}  // namespace ddd
