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

#include "mdirand/sweep.h"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace mdirand {

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "eta") return SweepParam::kEta;
  if (name == "alpha") return SweepParam::kAlpha;
  if (name == "q") return SweepParam::kQ;
  throw std::invalid_argument("unknown sweep parameter '" + name + "' (expected eta, alpha or q)");
}

std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::kEta: return "eta";
    case SweepParam::kAlpha: return "alpha";
    case SweepParam::kQ: return "q";
  }
  return "?";
}

std::vector<double> linear_grid(double from, double to, int steps) {
  if (steps < 1) throw std::invalid_argument("linear_grid: steps must be positive");
  if (steps == 1) return {from};
  std::vector<double> out;
  for (int i = 0; i < steps; ++i) {
    // Endpoints exactly, interior points by interpolation.
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    out.push_back(i == steps - 1 ? to : from + t * (to - from));
  }
  return out;
}

Scenario scenario_at(const ScenarioSpec& spec, SweepParam param, double value, double eta) {
  ScenarioSpec s = spec;
  switch (param) {
    case SweepParam::kEta:
      return build_scenario(s, value);
    case SweepParam::kAlpha:
      if (s.source.kind != SourceSpec::Kind::kPreset || s.source.preset != "angle") {
        throw SchemaError("source", "an alpha sweep needs the angle source preset");
      }
      s.source.alpha = value;
      return build_scenario(s, eta);
    case SweepParam::kQ:
      if (s.mode != RateMode::kFiniteQ) throw SchemaError("mode", "a q sweep needs finite-q mode");
      s.input_probs.reset();
      s.q = value;
      return build_scenario(s, eta);
  }
  throw std::logic_error("unreachable");
}

std::vector<SweepPoint> run_sweep(const ScenarioSpec& spec, SweepParam param, const std::vector<double>& grid,
                                  double eta, const RateOptions& opts, int jobs) {
  std::vector<SweepPoint> points(grid.size());
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, static_cast<int>(std::max<size_t>(1, grid.size())));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < grid.size(); i = next++) {
      SweepPoint& pt = points[i];
      pt.param = grid[i];
      try {
        pt.result = guessing_probability(scenario_at(spec, param, grid[i], eta), opts);
        pt.result.solution = SdpSolution{};
      } catch (const std::exception& e) {
        pt.error = e.what();
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return points;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
  os << "param,rate_bits,rate_per_qubit,p_guess_upper,classical_bound_bits,status\n";
  for (const auto& pt : points) {
    const RateResult& r = pt.result;
    os << format_number(pt.param) << ',';
    if (!pt.error.empty()) {
      os << "nan,nan,nan,nan,error\n";
      continue;
    }
    os << format_number(r.rate_bits) << ',' << format_number(r.rate_per_qubit) << ','
       << format_number(r.p_guess_upper) << ',' << format_number(r.classical_bound_bits) << ','
       << to_string(r.status) << '\n';
  }
}

}  // namespace mdirand
