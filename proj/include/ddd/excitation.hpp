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

#include <string>

#include "ddd/linalg.hpp"
#include "ddd/lti_lab.hpp"

namespace ddd {

/// Block Hankel matrix of depth k: block row i holds columns f_i .. f_{i+T-k}.
Matrix hankel(const Matrix& F, int depth);

struct PeReport {
  int order = 0;
  int hankel_rank = 0;
  int required_rank = 0;
  double min_singular_value = 0.0;
  bool is_pe = false;
  std::string reason;  ///< empty when the test could be carried out
};

/// Persistency of excitation of order `depth`: full row rank of hankel(F, depth).
PeReport pe_check(const Matrix& F, int depth);

struct FundamentalRankReport {
  bool full_rank = false;
  bool inconclusive = false;  ///< V0 not persistently exciting of order n+1
  int rank = 0;
  int required_rank = 0;
};

/// rank([X0; V0]) == 2n + m, flagged inconclusive when V0 is not PE of order n+1.
FundamentalRankReport fundamental_rank_check(const Matrix& X0, const Matrix& V0);

/// Logarithm used inside the horizon threshold and failure probability.
enum class LogBase { Natural, Two, Ten };

/// (n+1)(m+n) log^2(2(n+1)(m+n)) log^2(2T(m+n)).
double lambda_threshold(int m, int n, int T, LogBase base = LogBase::Natural);

/// (2T(m+n))^(-log^2(2(n+1)(m+n)) log(2T(m+n))).
double epsilon_T(int m, int n, int T, LogBase base = LogBase::Natural);

/// Natural log of epsilon_T; finite where epsilon_T itself underflows.
double log_epsilon_T(int m, int n, int T, LogBase base = LogBase::Natural);

/// sqrt(T - n) sigma_z / sqrt(2).
double hankel_sv_bound(int T, int n, double sigma_z);

/// sigma_min([X0; Z0]) sqrt(n+1) / sigma_min(H_{n+1}(Z0)); a lower estimate of
/// the plant constant relating state-input data to input excitation.
double empirical_rho(const Matrix& X0, const Matrix& Z0);

/// P2 = [[I,0,0],[0,I,0],[A,B,(sigma_w/sigma_u) I]].
Matrix p2_matrix(const LtiSystem& system);

struct CombinedBound {
  double bound = 0.0;
  double sigma_min_p2 = 0.0;
};

/// sigma_min(P2) sqrt(T-n) rho sigma_u / sqrt(2(n+1)).
CombinedBound combined_sv_bound(const LtiSystem& system, int T, double rho);

struct BoundReport {
  double lambda_value = 0.0;
  double epsilon_T = 0.0;
  double hankel_bound = 0.0;
  double combined_bound = 0.0;
  double rho_used = 0.0;
  double c_constant = 1.0;
  bool horizon_admissible = false;  ///< T >= c * Lambda(m, n, T)
};

BoundReport bound_report(const LtiSystem& system, int T, double rho, double c_constant = 1.0,
                         LogBase base = LogBase::Natural);

}  // namespace ddd
