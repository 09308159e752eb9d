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

// Acceptance report: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "mdirand/mdi.h"
#include "mdirand/scenario_file.h"
#include "mdirand/sdp_solver.h"
#include "mdirand/sweep.h"
#include "sdp_oracle.h"

namespace mdirand {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Scenario preset_at(const std::string& name, double eta) {
  return build_scenario(load_scenario(resolve_scenario_path(name)), eta);
}

// Rate of a solved point; NaN marks a solver failure.
double rate_of(const Scenario& s) {
  const RateResult r = guessing_probability(s);
  return r.ok() ? r.rate_bits : std::nan("");
}

struct Report {
  int failures = 0;
  void line(int id, bool ok, const std::string& detail) {
    std::printf("AC%d %s %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
  }
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

void ac1_ac2(Report& rep) {
  const auto t0 = Clock::now();
  const double r1 = rate_of(preset_at("fig3-blue", 1.0));
  const double dt = seconds_since(t0);
  rep.line(1, std::abs(r1 - 2.0) <= 1e-3 && dt < 30.0,
           "rate=" + fmt("%.9f", r1) + " target 2+-1e-3, " + fmt("%.2f", dt) + " s (limit 30 s)");
  const double r2 = rate_of(preset_at("fig3-blue", 0.97));
  rep.line(2, r2 >= 1.0 - 1e-3, "rate(eta=0.97)=" + fmt("%.9f", r2) + " target >= 0.999");
}

void ac3(Report& rep) {
  const double r = rate_of(preset_at("fig3-red", 1.0));
  rep.line(3, std::abs(r - 1.0) <= 1e-3, "rate=" + fmt("%.9f", r) + " target 1+-1e-3");
}

void ac4(Report& rep) {
  const RateResult zero = guessing_probability(angle_scenario(0.0, 1.0, 0.5));
  const RateResult one = guessing_probability(angle_scenario(1.0, 1.0, 0.5));
  bool ok = zero.ok() && zero.rate_bits == 0.0 && one.ok() && std::abs(one.rate_bits) <= 1e-6;
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const RateResult r = guessing_probability(angle_scenario(0.1 * k, 1.0, 0.5));
    const double dev = r.ok() ? std::abs(r.rate_bits - r.classical_bound_bits) : INFINITY;
    worst = std::max(worst, dev);
  }
  ok = ok && worst <= 1e-4;
  std::ostringstream os;
  os << "rate(0)=" << format_number(zero.rate_bits) << " rate(1)=" << format_number(one.rate_bits)
     << " max|rate-classical| on 0.1..0.9=" << format_number(worst) << " (limits 0, 1e-6, 1e-4)";
  rep.line(4, ok, os.str());
}

void ac5(Report& rep) {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path("fig5"));
  auto at = [&](double q, double eta) { return rate_of(scenario_at(spec, SweepParam::kQ, q, eta)); };
  const double hi_asym = at(0.999, 0.9), hi_sym = at(0.5, 0.9);
  const double lo_asym = at(0.999, 0.5), lo_sym = at(0.5, 0.5);
  std::ostringstream os;
  os << "eta=0.9: q=0.999 " << format_number(hi_asym) << " vs q=0.5 " << format_number(hi_sym)
     << "; eta=0.5: q=0.5 " << format_number(lo_sym) << " vs q=0.999 " << format_number(lo_asym);
  rep.line(5, hi_asym > hi_sym && lo_sym > lo_asym, os.str());
}

void ac6(Report& rep) {
  bool ok = true;
  std::ostringstream os;
  for (const std::string device : {"extremal3", "projective"}) {
    const auto t0 = Clock::now();
    double worst = INFINITY;
    bool solved = true;
    for (const double eta : linear_grid(0.8, 1.0, 5)) {
      const TwoCopyResult t = two_copy_delta(preset_at("fig7-" + device + "-single", eta));
      solved = solved && std::isfinite(t.delta);
      worst = std::min(worst, t.delta);
    }
    const double dt = seconds_since(t0);
    ok = ok && solved && worst >= -1e-6 && dt < 600.0;
    os << device << ": min delta=" << format_number(worst) << " in " << fmt("%.1f", dt) << " s; ";
  }
  os << "(limits delta >= -1e-6, 600 s per grid)";
  rep.line(6, ok, os.str());
}

void ac7(Report& rep) {
  bool ok = true;
  std::ostringstream os;
  for (const double eta : {0.8, 0.9, 1.0}) {
    const RateResult f1 = guessing_probability(preset_at("fig6-four-m1", eta));
    const RateResult f2 = guessing_probability(preset_at("fig6-four-m2", eta));
    const RateResult t1 = guessing_probability(preset_at("fig6-two-m1", eta));
    const RateResult t2 = guessing_probability(preset_at("fig6-two-m2", eta));
    const bool solved = f1.ok() && f2.ok() && t1.ok() && t2.ok();
    ok = ok && solved && f2.rate_per_qubit >= f1.rate_per_qubit - 1e-3 &&
         t2.rate_per_qubit <= t1.rate_per_qubit + 1e-3;
    os << "eta=" << format_number(eta) << " four " << format_number(f1.rate_per_qubit) << "->"
       << format_number(f2.rate_per_qubit) << " two " << format_number(t1.rate_per_qubit) << "->"
       << format_number(t2.rate_per_qubit) << "; ";
  }
  os << "(m=2 four >= m=1 - 1e-3, m=2 two <= m=1 + 1e-3)";
  rep.line(7, ok, os.str());
}

void ac8(Report& rep) {
  std::mt19937 rng(2024);
  double worst = 0.0;
  bool ok = true;
  const int n = 24;
  for (int t = 0; t < n; ++t) {
    const testing::Instance in = testing::random_instance(rng, 1 + t % 2, 2 + t % 5);
    const double ref = testing::BarrierOracle(in.problem, in.interior).maximize();
    const SdpSolution sol = solve_certified(in.problem);
    const double dev = usable(sol.status) ? std::abs(sol.primal_objective - ref) : INFINITY;
    worst = std::max(worst, dev);
    ok = ok && dev <= 1e-6 && sol.certified_upper_bound >= ref - 1e-9;
  }
  SdpProblem eig;
  eig.block_sizes = {2};
  RealMatrix c = RealMatrix::Zero(2, 2);
  c.diagonal() << 1.0, 2.0;
  eig.objective = {c};
  eig.constraints = {{{{0, RealMatrix::Identity(2, 2)}}, 1.0}};
  eig.certificate_groups = {{{{0, 1.0}}, {0}}};
  const SdpSolution s1 = solve_certified(eig);
  const double e1 = std::abs(s1.primal_objective - 2.0);

  SdpProblem fixed;
  fixed.block_sizes = {2};
  RealMatrix cf(2, 2);
  cf << 0.3, -1.1, -1.1, 2.4;
  fixed.objective = {cf};
  RealMatrix e00 = RealMatrix::Zero(2, 2), e11 = RealMatrix::Zero(2, 2), e01 = RealMatrix::Zero(2, 2);
  e00(0, 0) = 1.0;
  e11(1, 1) = 1.0;
  e01(0, 1) = e01(1, 0) = 1.0;
  fixed.constraints = {{{{0, e00}}, 0.5}, {{{0, e11}}, 0.5}, {{{0, e01}}, 0.0}};
  const SdpSolution s2 = solve(fixed);
  const double e2 = std::abs(s2.primal_objective - cf.trace() / 2.0);
  ok = ok && usable(s1.status) && usable(s2.status) && e1 <= 1e-8 && e2 <= 1e-8;
  std::ostringstream os;
  os << n << " random instances max|dev|=" << format_number(worst) << " (limit 1e-6); analytic errors "
     << format_number(e1) << ", " << format_number(e2) << " (limit 1e-8)";
  rep.line(8, ok, os.str());
}

// Property checks across modules; each returns an empty string on success.
std::string povm_validity() {
  std::vector<Povm> devices{sigma_z_povm(), sigma_x_povm(), povm_from_bloch(extremal3()),
                            povm_from_bloch(extremal4()), tensor_povm(povm_from_bloch(extremal4()), 2),
                            mix_white_noise(povm_from_bloch(extremal3()), 0.7)};
  for (const Povm& p : devices) {
    ComplexMatrix sum = ComplexMatrix::Zero(p.dim(), p.dim());
    for (const auto& e : p.elements()) {
      if (min_eigenvalue(e) < -1e-10) return "negative POVM element";
      sum += e.matrix();
    }
    if ((sum - ComplexMatrix::Identity(p.dim(), p.dim())).cwiseAbs().maxCoeff() > 1e-10) return "incomplete POVM";
  }
  return "";
}

std::string embedding_trace_identity() {
  std::mt19937 rng(7);
  for (int t = 0; t < 50; ++t) {
    const HermitianOperator a(testing::random_hermitian(rng, 1 + t % 4)), b(testing::random_hermitian(rng, 1 + t % 4));
    const double lhs = (real_embed(a) * real_embed(b)).trace();
    if (std::abs(lhs - 2.0 * trace_product(a, b)) > 1e-12 * (1.0 + std::abs(lhs))) return "embedding trace identity";
  }
  return "";
}

std::string weak_duality() {
  std::mt19937 rng(8);
  for (int t = 0; t < 10; ++t) {
    const testing::Instance in = testing::random_instance(rng, 2, 4);
    for (const IterationRecord& r : solve(in.problem).log) {
      const double lower = std::min(0.0, r.dual_slack_min_eig) * r.trace_x - r.y_norm * r.primal_residual;
      const double slack = 1e-10 * (1.0 + std::abs(r.primal_objective) + std::abs(r.dual_objective));
      if (r.dual_objective - r.primal_objective < lower - slack) return "weak duality at an iteration";
    }
  }
  return "";
}

std::string rate_invariants() {
  const Povm devices[] = {sigma_z_povm(), povm_from_bloch(extremal3()), povm_from_bloch(extremal4())};
  RealVector q(4);
  q << 0.55, 0.15, 0.15, 0.15;
  for (const RateMode mode : {RateMode::kAsymptoticAsymmetric, RateMode::kFiniteQ}) {
    for (const Povm& device : devices) {
      for (const double eta : {0.6, 0.8, 0.95, 1.0}) {
        const Scenario s =
            honest_scenario(StateEnsemble(tomographic_set()).with_input_probs(q), device, eta, mode);
        const RateResult r = guessing_probability(s);
        if (!r.ok()) return "solver failure: " + r.diagnostics;
        if (r.rate_bits > r.classical_bound_bits + 1e-6) return "rate above classical bound";
        if (r.rate_bits < 0.0 || r.rate_bits > 2.0 * std::log2(static_cast<double>(s.dim())) + 1e-9)
          return "rate out of range";
        const EffectiveStrategy m = honest_strategy(s, mix_white_noise(device, eta));
        if (!strategy_violation(m, s).empty()) return "honest strategy infeasible";
        if (strategy_objective(m, s) > r.p_guess_upper + 1e-7) return "honest strategy above bound";
      }
    }
  }
  return "";
}

std::string csv_determinism() {
  const ScenarioSpec spec = load_scenario(resolve_scenario_path("fig3-green"));
  const auto grid = linear_grid(0.7, 1.0, 4);
  std::ostringstream a, b;
  write_sweep_csv(a, run_sweep(spec, SweepParam::kEta, grid, 1.0, {}, 1));
  write_sweep_csv(b, run_sweep(spec, SweepParam::kEta, grid, 1.0, {}, 3));
  return a.str() == b.str() ? "" : "CSV differs between worker counts";
}

void ac9(Report& rep) {
  const std::pair<const char*, std::function<std::string()>> checks[] = {
      {"povm", povm_validity},         {"embedding", embedding_trace_identity},
      {"weak-duality", weak_duality},  {"rate", rate_invariants},
      {"csv", csv_determinism},
  };
  bool ok = true;
  std::ostringstream os;
  for (const auto& [name, fn] : checks) {
    std::string err;
    try {
      err = fn();
    } catch (const std::exception& e) {
      err = e.what();
    }
    ok = ok && err.empty();
    os << name << "=" << (err.empty() ? "ok" : err) << " ";
  }
  rep.line(9, ok, os.str());
}

}  // namespace
}  // namespace mdirand

int main() {
  mdirand::Report rep;
  const std::pair<int, std::function<void(mdirand::Report&)>> steps[] = {
      {1, mdirand::ac1_ac2}, {3, mdirand::ac3}, {4, mdirand::ac4}, {5, mdirand::ac5},
      {6, mdirand::ac6},     {7, mdirand::ac7}, {8, mdirand::ac8}, {9, mdirand::ac9},
  };
  for (const auto& [id, step] : steps) {
    try {
      step(rep);
    } catch (const std::exception& e) {
      rep.line(id, false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d criterion(s) failed\n", rep.failures);
  return rep.failures == 0 ? 0 : 1;
}
