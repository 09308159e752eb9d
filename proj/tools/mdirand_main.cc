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

// mdirand: randomness rates of measurement-device-independent setups.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "mdirand/mdi.h"
#include "mdirand/scenario_file.h"
#include "mdirand/sweep.h"

namespace {

using namespace mdirand;

constexpr int kExitSchema = 1;
constexpr int kExitSolver = 2;

struct SolverFlags {
  double gap_tol = 0.0;
  double feas_tol = 0.0;
  int max_iter = 0;
  double relax = 0.0;

  void add(CLI::App* app) {
    app->add_option("--gap-tol", gap_tol, "Relative duality gap tolerance")->check(CLI::PositiveNumber);
    app->add_option("--feas-tol", feas_tol, "Primal and dual feasibility tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "Interior-point iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--relax", relax, "Widen statistics equalities to bands of this half-width")
        ->check(CLI::NonNegativeNumber);
  }

  RateOptions options() const {
    RateOptions o;
    o.solver = SolverOptions::from(o.tol);
    if (gap_tol > 0.0) o.solver.gap_tol = gap_tol;
    if (feas_tol > 0.0) o.solver.feas_tol = feas_tol;
    if (max_iter > 0) o.solver.max_iter = max_iter;
    o.relax = relax;
    return o;
  }
};

std::string describe(const Scenario& s) {
  std::ostringstream os;
  os << to_string(s.mode) << ", n_s=" << s.inputs() << ", n_o=" << s.outcomes() << ", d=" << s.dim();
  return os.str();
}

nlohmann::json record(double eta, const RateResult& r) {
  auto num = [](double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); };
  return {{"eta", eta},
          {"status", std::string(to_string(r.status))},
          {"p_guess_upper", num(r.p_guess_upper)},
          {"rate_bits", num(r.rate_bits)},
          {"rate_per_qubit", num(r.rate_per_qubit)},
          {"classical_bound_bits", num(r.classical_bound_bits)},
          {"input_cost_bits", num(r.input_cost_bits)},
          {"net_expansion_bits", num(r.net_expansion_bits)},
          {"primal_objective", num(r.primal_objective)},
          {"dual_objective", num(r.dual_objective)},
          {"certificate_shift", num(r.certificate_shift)},
          {"iterations", r.iterations},
          {"constraints_raw", r.raw_constraints},
          {"constraints_kept", r.kept_constraints},
          {"face_restricted", r.face_restricted},
          {"clamped", r.clamped},
          {"diagnostics", r.diagnostics}};
}

int cmd_rate(const std::string& name, const std::optional<double>& eta_flag, const SolverFlags& flags,
             const std::string& json_out, const std::string& sdpa_out) {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path(name));
  std::vector<double> etas = spec.noise_eta;
  if (eta_flag) etas = {*eta_flag};
  if (etas.empty()) etas = {1.0};  // statistics table: eta unused
  const RateOptions opts = flags.options();

  nlohmann::json records = nlohmann::json::array();
  bool all_ok = true;
  for (double eta : etas) {
    const Scenario s = build_scenario(spec, eta);
    if (!sdpa_out.empty()) {
      const MdiSdp sdp = build_sdp(s, opts.relax, opts.tol, opts.restrict_face);
      std::ofstream f(sdpa_out);
      write_sdpa(f, sdp.reduced.problem);
    }
    const RateResult r = guessing_probability(s, opts);
    std::printf("scenario: %s (%s)\n", spec.name.empty() ? name.c_str() : spec.name.c_str(), describe(s).c_str());
    if (spec.device) std::printf("eta: %s\n", format_number(eta).c_str());
    std::printf("status: %s\n", std::string(to_string(r.status)).c_str());
    std::printf("p_guess_upper: %s\n", format_number(r.p_guess_upper).c_str());
    std::printf("rate_bits: %s\n", format_number(r.rate_bits).c_str());
    std::printf("rate_per_qubit: %s\n", format_number(r.rate_per_qubit).c_str());
    std::printf("classical_bound_bits: %s\n", format_number(r.classical_bound_bits).c_str());
    std::printf("input_cost_bits: %s\n", format_number(r.input_cost_bits).c_str());
    std::printf("net_expansion_bits: %s\n", format_number(r.net_expansion_bits).c_str());
    std::printf("solver: %d iterations, %ld of %ld constraints kept, certificate shift %s%s\n", r.iterations,
                static_cast<long>(r.kept_constraints), static_cast<long>(r.raw_constraints),
                format_number(r.certificate_shift).c_str(), r.face_restricted ? ", restricted to detector support" : "");
    if (!r.ok() || r.clamped) std::printf("diagnostics: %s\n", r.diagnostics.c_str());
    if (etas.size() > 1) std::printf("\n");
    all_ok = all_ok && r.ok();
    records.push_back(record(eta, r));
  }
  if (!json_out.empty()) {
    std::ofstream f(json_out);
    f << records.dump(2) << "\n";
  }
  return all_ok ? 0 : kExitSolver;
}

int cmd_sweep(const std::string& name, const std::string& param_name, std::optional<double> from,
              std::optional<double> to, int steps, const std::optional<double>& eta_flag, int jobs,
              const SolverFlags& flags, const std::string& out) {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path(name));
  const SweepParam param = parse_sweep_param(param_name);
  std::vector<double> grid;
  if (from || to) {
    if (!from || !to) throw std::invalid_argument("--from and --to go together");
    grid = linear_grid(*from, *to, steps);
  } else if (param == SweepParam::kEta && !spec.noise_eta.empty()) {
    grid = spec.noise_eta;
  } else {
    throw std::invalid_argument("give --from and --to for this sweep");
  }
  const double eta = eta_flag ? *eta_flag : (spec.noise_eta.empty() ? 1.0 : spec.noise_eta.front());
  const auto points = run_sweep(spec, param, grid, eta, flags.options(), jobs);
  for (const auto& pt : points) {
    if (!pt.error.empty()) std::fprintf(stderr, "%s=%s: %s\n", param_name.c_str(), format_number(pt.param).c_str(), pt.error.c_str());
  }
  if (out.empty() || out == "-") {
    write_sweep_csv(std::cout, points);
  } else {
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    write_sweep_csv(f, points);
  }
  return 0;
}

int cmd_validate(const std::string& name) {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path(name));
  int failed = 0;
  for (const auto& c : validate_scenario(spec)) {
    std::printf("%-10s %s  %s\n", c.name.c_str(), c.ok ? "PASS" : "FAIL", c.detail.c_str());
    failed += c.ok ? 0 : 1;
  }
  std::printf("%d check(s) failed\n", failed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified randomness rates for measurement-device-independent setups"};
  app.require_subcommand(1);

  std::string scenario, json_out, sdpa_out, out, param = "eta";
  std::optional<double> eta, from, to;
  int steps = 21, jobs = 0;
  SolverFlags flags;

  CLI::App* rate = app.add_subcommand("rate", "Certified rate of a scenario file or preset");
  rate->add_option("scenario", scenario, "Scenario file or preset name")->required();
  rate->add_option("--eta", eta, "Detector quality (overrides the file)")->check(CLI::Range(0.0, 1.0));
  rate->add_option("--json", json_out, "Write machine-readable results to this file");
  rate->add_option("--dump-sdpa", sdpa_out, "Write the reduced SDP in SDPA sparse format");
  flags.add(rate);

  CLI::App* sweep = app.add_subcommand("sweep", "Rate over a parameter grid, as CSV");
  sweep->add_option("scenario", scenario, "Scenario file or preset name")->required();
  sweep->add_option("--param", param, "eta, alpha or q")->check(CLI::IsMember({"eta", "alpha", "q"}));
  sweep->add_option("--from", from, "First grid value");
  sweep->add_option("--to", to, "Last grid value");
  sweep->add_option("--steps", steps, "Number of grid points")->check(CLI::PositiveNumber);
  sweep->add_option("--eta", eta, "Detector quality for alpha and q sweeps")->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--jobs", jobs, "Worker threads (default: all processors)")->check(CLI::NonNegativeNumber);
  sweep->add_option("--out", out, "CSV output file (default: stdout)");
  flags.add(sweep);

  CLI::App* validate = app.add_subcommand("validate", "Check states, POVM, unbiasedness and extremality");
  validate->add_option("scenario", scenario, "Scenario file or preset name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (rate->parsed()) return cmd_rate(scenario, eta, flags, json_out, sdpa_out);
    if (sweep->parsed()) return cmd_sweep(scenario, param, from, to, steps, eta, jobs, flags, out);
    return cmd_validate(scenario);
  } catch (const SchemaError& e) {
    std::fprintf(stderr, "schema error: %s\n", e.what());
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitSchema;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kExitSolver;
  }
}
