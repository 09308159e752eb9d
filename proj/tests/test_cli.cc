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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mdirand/scenario_file.h"
#include "mdirand/sweep.h"

namespace mdirand {
namespace {

std::filesystem::path data(const std::string& name) { return std::filesystem::path(MDIRAND_TEST_DATA) / name; }

std::string schema_error(std::string_view text) {
  try {
    parse_scenario(text);
  } catch (const SchemaError& e) {
    return e.what();
  }
  return "";
}

TEST(ScenarioFile, PresetsRoundTrip) {
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(preset_directory())) {
    if (entry.path().extension() != ".json") continue;
    ++count;
    const ScenarioSpec spec = load_scenario(entry.path());
    const ScenarioSpec again = parse_scenario(serialize_scenario(spec));
    EXPECT_TRUE(spec == again) << entry.path();
    EXPECT_EQ(serialize_scenario(again), serialize_scenario(spec));
    EXPECT_EQ(spec.name, entry.path().stem().string());
  }
  EXPECT_GE(count, 14);
}

TEST(ScenarioFile, PresetsBuildValidScenarios) {
  for (const std::string name : {"fig3-blue", "fig3-red", "fig3-green", "fig4", "fig5", "fig6-four-m1",
                                 "fig6-two-m2", "fig7-extremal3-single", "fig7-projective-double"}) {
    const ScenarioSpec spec = load_scenario(resolve_scenario_path(name));
    const Scenario s = build_scenario(spec);
    EXPECT_NO_THROW(s.validate()) << name;
  }
  const Scenario two = build_scenario(load_scenario(resolve_scenario_path("fig6-two-m2")));
  EXPECT_EQ(two.dim(), 4);
  EXPECT_EQ(two.inputs(), 4);
  const Scenario dbl = build_scenario(load_scenario(resolve_scenario_path("fig7-extremal3-double")));
  EXPECT_EQ(dbl.inputs(), 16);
  EXPECT_EQ(dbl.outcomes(), 9);
}

TEST(ScenarioFile, ExplicitDensityAndElementsRoundTrip) {
  const std::string text = R"({
    "schema_version": 1,
    "source": {"density_matrices": [
      {"real": [[1, 0], [0, 0]]},
      {"real": [[0.5, 0], [0, 0.5]], "imag": [[0, 0.5], [-0.5, 0]]}]},
    "input_probs": [0.25, 0.75],
    "honest_device": {"elements": [
      {"real": [[1, 0], [0, 0]]}, {"real": [[0, 0], [0, 1]]}]},
    "noise_eta": 0.9
  })";
  const ScenarioSpec spec = parse_scenario(text);
  EXPECT_EQ(spec.source.kind, SourceSpec::Kind::kDensity);
  EXPECT_NEAR(spec.source.density[1](0, 1).imag(), 0.5, 1e-15);
  EXPECT_TRUE(parse_scenario(serialize_scenario(spec)) == spec);
  const Scenario s = build_scenario(spec, 0.9);
  EXPECT_NEAR(s.observed.conditional(0, 0), 0.95, 1e-12);
  EXPECT_NEAR(s.ensemble.input_probs()(1), 0.75, 1e-15);
}

TEST(ScenarioFile, SchemaErrors) {
  EXPECT_NE(schema_error(R"({"schema_version": 1,)").find("line 1"), std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 2, "source": {"preset": "tomographic"}})").find("schema_version"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 1, "source": {"preset": "tomographic"},
      "honest_device": "sigma_z", "noise_eta": 1, "colour": 3})").find("colour"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 1, "source": {"preset": "tomographic"},
      "honest_device": "sigma_z"})").find("noise_eta"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 1, "source": {"preset": "tomographic"},
      "honest_device": "sigma_z", "noise_eta": 1, "statistics": [[1, 0]]})").find("statistics"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 1, "source": {"preset": "tomographic"}, "mode": "asymptotic",
      "q": 0.5, "honest_device": "sigma_z", "noise_eta": 1})").find("q"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 1, "source": {"preset": "tomographic"},
      "honest_device": "pauli", "noise_eta": 1})").find("honest_device"),
            std::string::npos);
  EXPECT_NE(schema_error(R"({"schema_version": 1, "source": {"preset": "tomographic"},
      "honest_device": "sigma_z", "noise_eta": [0.5, 1.5]})").find("noise_eta[1]"),
            std::string::npos);
}

TEST(ScenarioFile, BadStatisticsRow) {
  const ScenarioSpec spec = load_scenario(data("bad_row.json"));
  try {
    build_scenario(spec);
    FAIL() << "expected a schema error";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.where(), "statistics[1]");
    EXPECT_NE(std::string(e.what()).find("0.9"), std::string::npos);
  }
}

TEST(Validate, Checks) {
  auto lookup = [](const std::vector<ValidationCheck>& checks, const std::string& name) {
    for (const auto& c : checks)
      if (c.name == name) return c;
    ADD_FAILURE() << "no check " << name;
    return ValidationCheck{};
  };
  for (const auto& c : validate_scenario(load_scenario(data("extremal4_only.json")))) EXPECT_TRUE(c.ok) << c.name << " " << c.detail;
  const auto coplanar = validate_scenario(load_scenario(data("coplanar.json")));
  const ValidationCheck ext = lookup(coplanar, "extremal");
  EXPECT_FALSE(ext.ok);
  EXPECT_NE(ext.detail.find("coplanar"), std::string::npos);
  EXPECT_FALSE(lookup(validate_scenario(load_scenario(data("long_bloch.json"))), "states").ok);
  EXPECT_FALSE(lookup(validate_scenario(load_scenario(resolve_scenario_path("fig4"))), "unbiased").ok);
}

TEST(Sweep, GridAndFormatting) {
  const auto g = linear_grid(0.8, 1.0, 21);
  ASSERT_EQ(g.size(), 21u);
  EXPECT_EQ(g.front(), 0.8);
  EXPECT_EQ(g.back(), 1.0);
  EXPECT_NEAR(g[10], 0.9, 1e-15);
  EXPECT_EQ(linear_grid(0.3, 0.7, 1), std::vector<double>{0.3});
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(parse_sweep_param("q"), SweepParam::kQ);
  EXPECT_THROW(parse_sweep_param("beta"), std::invalid_argument);
}

TEST(Sweep, ParameterApplicability) {
  const ScenarioSpec blue = load_scenario(resolve_scenario_path("fig3-blue"));
  EXPECT_THROW(scenario_at(blue, SweepParam::kAlpha, 0.5, 1.0), SchemaError);
  EXPECT_THROW(scenario_at(blue, SweepParam::kQ, 0.5, 1.0), SchemaError);
  const ScenarioSpec fig5 = load_scenario(resolve_scenario_path("fig5"));
  const Scenario s = scenario_at(fig5, SweepParam::kQ, 0.7, 0.9);
  EXPECT_NEAR(s.ensemble.input_probs()(0), 0.7, 1e-15);
  const ScenarioSpec fig4 = load_scenario(resolve_scenario_path("fig4"));
  const Scenario a = scenario_at(fig4, SweepParam::kAlpha, 1.0, 1.0);
  EXPECT_NEAR(a.observed.conditional(0, 0), 1.0, 1e-12);
}

TEST(Sweep, CsvIsDeterministicAcrossWorkerCounts) {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path("fig3-red"));
  const auto grid = linear_grid(0.8, 1.0, 5);
  std::ostringstream one, four, again;
  write_sweep_csv(one, run_sweep(spec, SweepParam::kEta, grid, 1.0, {}, 1));
  write_sweep_csv(four, run_sweep(spec, SweepParam::kEta, grid, 1.0, {}, 4));
  write_sweep_csv(again, run_sweep(spec, SweepParam::kEta, grid, 1.0, {}, 4));
  EXPECT_EQ(one.str(), four.str());
  EXPECT_EQ(four.str(), again.str());
  std::istringstream in(one.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "param,rate_bits,rate_per_qubit,p_guess_upper,classical_bound_bits,status");
  int rows = 0;
  double previous = -1.0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string param, rate;
    std::getline(fields, param, ',');
    std::getline(fields, rate, ',');
    EXPECT_EQ(param, format_number(grid[static_cast<size_t>(rows - 1)]));
    EXPECT_GE(std::stod(rate), previous - 1e-5);
    previous = std::stod(rate);
    EXPECT_EQ(line.substr(line.size() - 7), "optimal") << line;
  }
  EXPECT_EQ(rows, 5);
}

TEST(Sweep, FailuresAreRecordedPerPoint) {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path("fig3-blue"));
  const auto pts = run_sweep(spec, SweepParam::kAlpha, {0.9}, 1.0, {}, 1);
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_FALSE(pts[0].error.empty());
  std::ostringstream os;
  write_sweep_csv(os, pts);
  EXPECT_NE(os.str().find("0.9,nan,nan,nan,nan,error"), std::string::npos);
}

}  // namespace
}  // namespace mdirand
