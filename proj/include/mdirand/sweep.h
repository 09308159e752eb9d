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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mdirand/mdi.h"
#include "mdirand/scenario_file.h"

namespace mdirand {

enum class SweepParam { kEta, kAlpha, kQ };

SweepParam parse_sweep_param(const std::string& name);
std::string_view to_string(SweepParam p);

// Evenly spaced grid with `steps` points including both ends.
std::vector<double> linear_grid(double from, double to, int steps);

// Scenario at one grid value. eta uses the device noise, alpha requires the
// angle source preset, q requires finite-q mode.
Scenario scenario_at(const ScenarioSpec& spec, SweepParam param, double value, double eta);

struct SweepPoint {
  double param = 0.0;
  RateResult result;
  std::string error;  // set when the point could not be evaluated
};

// Points are evaluated by up to `jobs` threads (0 = hardware concurrency)
// and returned in grid order. `eta` is the noise level for alpha and q sweeps.
std::vector<SweepPoint> run_sweep(const ScenarioSpec& spec, SweepParam param, const std::vector<double>& grid,
                                  double eta, const RateOptions& opts, int jobs = 0);

std::string format_number(double v);
void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points);

}  // namespace mdirand
