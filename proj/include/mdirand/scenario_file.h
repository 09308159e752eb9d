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

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mdirand/mdi.h"
#include "mdirand/quantum.h"

namespace mdirand {

inline constexpr int kSchemaVersion = 1;

// Malformed scenario file. `where` is a JSON path such as "statistics[2]" or
// "line 7, column 3" for syntax errors.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

using Vec3 = std::array<double, 3>;

struct SourceSpec {
  enum class Kind { kPreset, kBloch, kDensity };
  Kind kind = Kind::kPreset;
  std::string preset;  // tomographic, plus-zero, angle
  double alpha = 0.0;  // angle preset only
  std::vector<Vec3> bloch;
  std::vector<ComplexMatrix> density;

  bool operator==(const SourceSpec&) const = default;
};

struct DeviceSpec {
  enum class Kind { kPreset, kBloch, kElements };
  Kind kind = Kind::kPreset;
  std::string preset;  // sigma_z, sigma_x, extremal3, extremal4
  std::vector<double> weights;
  std::vector<Vec3> directions;
  std::vector<ComplexMatrix> elements;

  bool operator==(const DeviceSpec&) const = default;
};

// A scenario file after structural parsing. Physical validity is checked by
// build_scenario (throwing) and validate_scenario (reporting).
struct ScenarioSpec {
  int schema_version = kSchemaVersion;
  std::string name;
  std::string description;
  SourceSpec source;
  int tensor_power = 1;  // states and device raised to this tensor power
  int copies = 1;        // 2 doubles states and statistics
  RateMode mode = RateMode::kFiniteQ;
  std::optional<std::vector<double>> input_probs;
  std::optional<double> q;  // p = (q, (1-q)/(n-1), ...)
  Index generation_index = 0;
  std::optional<DeviceSpec> device;
  std::vector<double> noise_eta;  // single value or grid; empty with a statistics table
  std::optional<std::vector<std::vector<double>>> statistics;  // rows a, columns x

  bool operator==(const ScenarioSpec&) const = default;
};

ScenarioSpec parse_scenario(std::string_view json_text);
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioSpec& spec);

// A readable file path is used as is; otherwise `name` is looked up as
// <preset dir>/<name>.json, with the directory taken from MDIRAND_PRESET_DIR.
std::filesystem::path resolve_scenario_path(const std::string& name);
std::filesystem::path preset_directory();

// Single-copy states after the tensor power.
StateEnsemble build_states(const ScenarioSpec& spec);
Povm build_device(const ScenarioSpec& spec);

// Scenario at noise level eta (ignored with a statistics table). Throws
// SchemaError when the file describes physically invalid objects.
Scenario build_scenario(const ScenarioSpec& spec, double eta);
Scenario build_scenario(const ScenarioSpec& spec);  // first noise value

struct ValidationCheck {
  std::string name;
  bool ok = false;
  std::string detail;
};

std::vector<ValidationCheck> validate_scenario(const ScenarioSpec& spec);

}  // namespace mdirand
