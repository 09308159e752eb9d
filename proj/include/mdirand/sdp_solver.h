// Copyright 2026 The mdirand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "mdirand/sdp_problem.h"

namespace mdirand {

enum class SolveStatus { kOptimal, kNearOptimal, kInfeasibleDetected, kNumericalFailure };

std::string_view to_string(SolveStatus s);
inline bool usable(SolveStatus s) {
  return s == SolveStatus::kOptimal || s == SolveStatus::kNearOptimal;
}

struct SolverOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;
  double certify_max_shift = 1e-4;
  // Largest problem accepted by solve().
  Index max_constraints = 5000;
  Index max_block_size = 64;

  static SolverOptions from(const Tolerances& tol);
};

struct IterationRecord {
  int iteration = 0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;  // |b - A(X)|_2
  double dual_residual = 0.0;    // |Z - (A^T y - C)|_F
  double mu = 0.0;
  double sigma = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
  double dual_slack_min_eig = 0.0;  // of A^T y - C
  double trace_x = 0.0;
  double y_norm = 0.0;
};

struct SdpSolution {
  BlockMatrix x;
  RealVector y;
  BlockMatrix z;  // A^T y - C
  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double certified_upper_bound = std::numeric_limits<double>::quiet_NaN();
  double certificate_shift = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::kNumericalFailure;
  double primal_residual = std::numeric_limits<double>::infinity();  // relative, inf-norm
  double dual_min_eig = -std::numeric_limits<double>::infinity();
  double relative_gap = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<IterationRecord> log;
  std::string message;
};

// Infeasible-start primal-dual path following (HKM direction, Mehrotra
// predictor-corrector) on a preprocessed problem. Starts from X = Z = tau I,
// y = 0 with tau = 1 + max|b_i|. Returns the best iterate seen; when the
// problem carries certificate groups, certified_upper_bound is filled in.
SdpSolution solve(const SdpProblem& p, const SolverOptions& opts = {});

struct CertifiedBound {
  bool ok = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double shift = 0.0;  // identity shift applied to the dual slack
  std::string reason;
};

// Shifts the certificate-group multipliers until sum y_i A_i - C is PSD on
// every block (with a rounding margin) and returns b^T y'. Refuses when the
// required shift exceeds max_shift or a deficient block has no group.
CertifiedBound certify_upper_bound(const SdpProblem& p, const SdpSolution& sol,
                                   double max_shift = 1e-4);

// preprocess -> solve -> lift the dual to the input rows -> certify against the
// input problem. The returned y and z refer to the input problem.
SdpSolution solve_certified(const SdpProblem& input, const Preprocessed& pre,
                            const SolverOptions& opts = {});
SdpSolution solve_certified(const SdpProblem& input, const SolverOptions& opts = {});

}  // namespace mdirand
