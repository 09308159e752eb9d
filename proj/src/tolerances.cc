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

#include "mdirand/tolerances.h"

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mdirand {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double to_double(std::string_view key, std::string_view value) {
  std::string buf(value);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (buf.empty() || end != buf.c_str() + buf.size()) {
    throw std::invalid_argument("tolerance '" + std::string(key) +
                                "': not a number: '" + buf + "'");
  }
  return v;
}

}  // namespace

Tolerances parse_tolerance_overrides(std::string_view spec, Tolerances t) {
  while (!spec.empty()) {
    auto comma = spec.find(',');
    auto item = trim(spec.substr(0, comma));
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("tolerance override '" + std::string(item) +
                                  "' is not key=value");
    }
    auto key = trim(item.substr(0, eq));
    double v = to_double(key, trim(item.substr(eq + 1)));
    if (key == "hermitian") t.hermitian = v;
    else if (key == "jacobi_offdiag") t.jacobi_offdiag = v;
    else if (key == "jacobi_max_sweeps") t.jacobi_max_sweeps = static_cast<int>(v);
    else if (key == "trace") t.trace = v;
    else if (key == "psd") t.psd = v;
    else if (key == "completeness") t.completeness = v;
    else if (key == "bloch_weights") t.bloch_weights = v;
    else if (key == "bloch_balance") t.bloch_balance = v;
    else if (key == "bloch_norm") t.bloch_norm = v;
    else if (key == "unit_direction") t.unit_direction = v;
    else if (key == "distribution") t.distribution = v;
    else if (key == "stats_row") t.stats_row = v;
    else if (key == "dedup") t.dedup = v;
    else if (key == "consistency") t.consistency = v;
    else if (key == "gap") t.gap = v;
    else if (key == "feas") t.feas = v;
    else if (key == "max_iter") t.max_iter = static_cast<int>(v);
    else if (key == "step_fraction") t.step_fraction = v;
    else if (key == "certify_max_shift") t.certify_max_shift = v;
    else if (key == "rate_clamp") t.rate_clamp = v;
    else if (key == "pguess_clamp") t.pguess_clamp = v;
    else throw std::invalid_argument("unknown tolerance '" + std::string(key) + "'");
  }
  return t;
}

const Tolerances& default_tolerances() {
  static const Tolerances tol = [] {
    const char* env = std::getenv("MDIRAND_TOLERANCES");
    return env ? parse_tolerance_overrides(env) : Tolerances{};
  }();
  return tol;
}

}  // namespace mdirand
