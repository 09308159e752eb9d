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

#include <string>
#include <string_view>

namespace mdirand {

// Every numerical threshold used by the library. Defaults can be overridden
// process-wide through the MDIRAND_TOLERANCES environment variable, e.g.
//   MDIRAND_TOLERANCES="gap=1e-9,feas=1e-9,max_iter=300"
struct Tolerances {
  double hermitian = 1e-12;        // |h - h^dagger| entrywise
  double jacobi_offdiag = 1e-12;   // relative off-diagonal norm at convergence
  int jacobi_max_sweeps = 100;
  double trace = 1e-10;            // density matrix trace
  double psd = 1e-10;              // smallest admissible eigenvalue is -psd
  double completeness = 1e-10;     // POVM sum vs identity
  double bloch_weights = 1e-12;    // sum of alpha_k
  double bloch_balance = 1e-10;    // |sum alpha_k m_k|
  double bloch_norm = 1e-12;       // |r| <= 1 + bloch_norm
  double unit_direction = 1e-10;   // |m_k| = 1 for extremality
  double distribution = 1e-12;     // input distribution sums to one
  double stats_row = 1e-10;        // conditional rows sum to one
  double dedup = 1e-9;             // dependent constraint rows
  double consistency = 1e-8;       // right-hand side of dropped rows
  double gap = 1e-8;               // relative duality gap
  double feas = 1e-8;              // primal residual and dual slack
  int max_iter = 200;
  double step_fraction = 0.98;
  double certify_max_shift = 1e-4;
  double rate_clamp = 1e-7;        // |rate| below this reports as zero
  double pguess_clamp = 1e-8;      // bound above 1 + this is flagged
};

// Applies "key=value,key=value" overrides; throws std::invalid_argument on
// unknown keys or malformed values.
Tolerances parse_tolerance_overrides(std::string_view spec, Tolerances base = {});

// Defaults with the MDIRAND_TOLERANCES overrides applied (read once).
const Tolerances& default_tolerances();

}  // namespace mdirand
