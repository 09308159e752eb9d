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

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdirand/quantum.h"
#include "mdirand/sdp_problem.h"
#include "mdirand/sdp_solver.h"
#include "mdirand/tolerances.h"

namespace mdirand {

enum class RateMode { kFiniteQ, kAsymptoticAsymmetric };

std::string_view to_string(RateMode m);

// Input probabilities are taken from `observed`. In asymptotic mode they only
// matter for reporting; the objective uses generation_index alone.
struct Scenario {
  StateEnsemble ensemble;
  ObservedStatistics observed;
  RateMode mode = RateMode::kFiniteQ;
  Index generation_index = 0;  // zero-based

  Index inputs() const { return ensemble.size(); }
  Index outcomes() const { return observed.outcomes(); }
  Index dim() const { return ensemble.dim(); }

  // Throws std::invalid_argument when shapes disagree.
  void validate() const;
};

// Honest-device scenario: statistics of `device` on `states`, mixed with white
// noise of weight 1 - eta. Input probabilities come from the ensemble.
Scenario honest_scenario(const StateEnsemble& states, const Povm& device, double eta,
                         RateMode mode, Index generation_index = 0);

// Operators M_{x,e|a}.
class EffectiveStrategy {
 public:
  EffectiveStrategy(Index inputs, Index outcomes, Index dim);

  Index inputs() const { return n_s_; }
  Index outcomes() const { return n_o_; }
  Index dim() const { return d_; }

  ComplexMatrix& at(Index x, Index e, Index a) { return ops_[index(x, e, a)]; }
  const ComplexMatrix& at(Index x, Index e, Index a) const { return ops_[index(x, e, a)]; }

 private:
  size_t index(Index x, Index e, Index a) const {
    return static_cast<size_t>((a * n_o_ + x) * n_o_ + e);
  }
  Index n_s_, n_o_, d_;
  std::vector<ComplexMatrix> ops_;
};

// Objective value of a strategy: sum_a w_a tr(M_{x,x|a} rho(a)) summed over x.
double strategy_objective(const EffectiveStrategy& m, const Scenario& s);

// Empty when the strategy satisfies positivity, normalization,
// proportionality, nonsignalling and reproduces the statistics within tol.
std::string strategy_violation(const EffectiveStrategy& m, const Scenario& s, double tol = 1e-8);

// M_{x,e|a} = [e == e*(a)] N_x with e*(a) the most likely outcome for input a.
// Feasible whenever the scenario's statistics are exactly those of `device`.
EffectiveStrategy honest_strategy(const Scenario& s, const Povm& device);

struct SdpLayout {
  Index inputs = 0;
  Index outcomes = 0;
  Index dim = 0;
  Index normalization_rows = 0;
  Index proportionality_rows = 0;
  Index nonsignalling_rows = 0;
  Index statistics_rows = 0;
  Index relaxation_rows = 0;

  Index block(Index a, Index x, Index e) const { return (a * outcomes + x) * outcomes + e; }
  Index strategy_blocks() const { return inputs * outcomes * outcomes; }
  Index raw_rows() const {
    return normalization_rows + proportionality_rows + nonsignalling_rows + statistics_rows +
           relaxation_rows;
  }
};

// Orthonormal bases U_x with range(N_x) inside span(U_x) for every feasible
// strategy, N_x = sum_e M_{x,e|a}. Outcomes with zero probability for some
// input exclude that state's support; if the statistics then fix N_x uniquely
// its range is used. Identity bases when nothing can be excluded.
std::vector<ComplexMatrix> detector_support(const Scenario& s);

struct MdiSdp {
  SdpProblem problem;              // full formulation
  std::optional<FaceRestriction> face;
  Preprocessed reduced;            // of face->problem when present
  SdpLayout layout;

  const SdpProblem& solved_problem() const { return face ? face->problem : problem; }
};

// relax > 0 widens every statistics equality to a band of half-width relax.
// With restrict_face every M_{x,e|a} is confined to detector_support(s)[x];
// this leaves the optimum unchanged and restores strict feasibility when the
// statistics sit on the boundary (e.g. noiseless detectors).
MdiSdp build_sdp(const Scenario& s, double relax = 0.0,
                 const Tolerances& tol = default_tolerances(), bool restrict_face = true);

EffectiveStrategy strategy_from_primal(const SdpLayout& layout, const BlockMatrix& x);

struct RateOptions {
  SolverOptions solver;
  double relax = 0.0;
  bool restrict_face = true;
  Tolerances tol = default_tolerances();
};

struct RateResult {
  double p_guess_upper = std::numeric_limits<double>::quiet_NaN();
  double rate_bits = std::numeric_limits<double>::quiet_NaN();
  double rate_per_qubit = std::numeric_limits<double>::quiet_NaN();
  double classical_bound_bits = std::numeric_limits<double>::quiet_NaN();
  double input_cost_bits = 0.0;
  double net_expansion_bits = std::numeric_limits<double>::quiet_NaN();
  SolveStatus status = SolveStatus::kNumericalFailure;
  bool clamped = false;
  bool face_restricted = false;
  std::string diagnostics;

  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double certificate_shift = 0.0;
  int iterations = 0;
  Index raw_constraints = 0;
  Index kept_constraints = 0;
  SdpSolution solution;  // x expanded to the full blocks; y, z of the solved problem
  SdpLayout layout;

  bool ok() const { return usable(status); }
};

RateResult guessing_probability(const Scenario& s, const RateOptions& opts = {});

// -log2 sum_a max_x p_a P(x|a).
double classical_min_entropy(const ObservedStatistics& stats);
// Mode aware: in asymptotic mode only the generation row counts.
double classical_min_entropy(const Scenario& s);

double input_cost(const RealVector& p);

struct TwoCopyResult {
  RateResult single;
  RateResult doubled;
  double delta = std::numeric_limits<double>::quiet_NaN();
};

Scenario double_scenario(const Scenario& s);
TwoCopyResult two_copy_delta(const Scenario& s, const RateOptions& opts = {});

// Two angle states, sigma_x honest device, finite-q with p = (q, 1 - q).
Scenario angle_scenario(double alpha, double eta, double q);
std::vector<std::pair<double, RateResult>> angle_sweep(const std::vector<double>& alphas,
                                                       double eta, double q,
                                                       const RateOptions& opts = {});

}  // namespace mdirand
