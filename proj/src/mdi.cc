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

#include "mdirand/mdi.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mdirand {
namespace {

// Hermitian basis of d x d matrices: diagonal units first, then for each j<k
// the symmetric and antisymmetric pairs. Re tr(B M) reads off the matching
// real coordinate of M.
struct BasisElement {
  ComplexMatrix b;
  bool diagonal = false;
  Index j = 0, k = 0;
};

std::vector<BasisElement> hermitian_basis(Index d) {
  std::vector<BasisElement> out;
  for (Index j = 0; j < d; ++j) {
    BasisElement e{ComplexMatrix::Zero(d, d), true, j, j};
    e.b(j, j) = 1.0;
    out.push_back(std::move(e));
  }
  const Complex i(0.0, 1.0);
  for (Index j = 0; j < d; ++j) {
    for (Index k = j + 1; k < d; ++k) {
      BasisElement re{ComplexMatrix::Zero(d, d), false, j, k};
      re.b(j, k) = re.b(k, j) = 0.5;
      out.push_back(std::move(re));
      BasisElement im{ComplexMatrix::Zero(d, d), false, j, k};
      im.b(j, k) = 0.5 * i;
      im.b(k, j) = -0.5 * i;
      out.push_back(std::move(im));
    }
  }
  return out;
}

// Block coefficient whose Frobenius pairing with embed(M) gives Re tr(B M).
RealMatrix pairing(const ComplexMatrix& b) { return 0.5 * real_embed(b); }

double log2_safe(double p) { return std::log2(p); }

}  // namespace

std::string_view to_string(RateMode m) {
  return m == RateMode::kFiniteQ ? "finite-q" : "asymptotic";
}

void Scenario::validate() const {
  if (ensemble.size() == 0) throw std::invalid_argument("scenario: empty ensemble");
  if (observed.inputs() != ensemble.size()) {
    throw std::invalid_argument("scenario: statistics have " + std::to_string(observed.inputs()) +
                                " input rows but the ensemble has " + std::to_string(ensemble.size()) +
                                " states");
  }
  if (observed.outcomes() < 1) throw std::invalid_argument("scenario: no outcomes");
  if (generation_index < 0 || generation_index >= ensemble.size()) {
    throw std::invalid_argument("scenario: generation_index out of range");
  }
}

Scenario honest_scenario(const StateEnsemble& states, const Povm& device, double eta, RateMode mode,
                         Index generation_index) {
  if (device.dim() != states.dim()) {
    throw std::invalid_argument("honest_scenario: device and states differ in dimension");
  }
  Scenario s{states, mix_white_noise(honest_statistics(states, device), eta), mode, generation_index};
  s.validate();
  return s;
}

EffectiveStrategy::EffectiveStrategy(Index inputs, Index outcomes, Index dim)
    : n_s_(inputs), n_o_(outcomes), d_(dim),
      ops_(static_cast<size_t>(inputs * outcomes * outcomes), ComplexMatrix::Zero(dim, dim)) {}

namespace {

double input_weight(const Scenario& s, Index a) {
  if (s.mode == RateMode::kAsymptoticAsymmetric) return 1.0;
  return s.observed.input_probs()(a);
}

double objective_weight(const Scenario& s, Index a) {
  if (s.mode == RateMode::kAsymptoticAsymmetric) return a == s.generation_index ? 1.0 : 0.0;
  return s.observed.input_probs()(a);
}

}  // namespace

double strategy_objective(const EffectiveStrategy& m, const Scenario& s) {
  double v = 0.0;
  for (Index a = 0; a < s.inputs(); ++a) {
    const double w = objective_weight(s, a);
    if (w == 0.0) continue;
    for (Index x = 0; x < s.outcomes(); ++x)
      v += w * (m.at(x, x, a) * s.ensemble[a].matrix()).trace().real();
  }
  return v;
}

std::string strategy_violation(const EffectiveStrategy& m, const Scenario& s, double tol) {
  const Index ns = m.inputs(), no = m.outcomes(), d = m.dim();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  auto tag = [](Index x, Index e, Index a) {
    return "(x=" + std::to_string(x) + ",e=" + std::to_string(e) + ",a=" + std::to_string(a) + ")";
  };
  for (Index a = 0; a < ns; ++a) {
    ComplexMatrix total = ComplexMatrix::Zero(d, d);
    for (Index x = 0; x < no; ++x) {
      for (Index e = 0; e < no; ++e) {
        const ComplexMatrix& op = m.at(x, e, a);
        if ((op - op.adjoint()).cwiseAbs().maxCoeff() > tol) return "not Hermitian at " + tag(x, e, a);
        if (min_symmetric_eigenvalue(real_embed(op)) < -tol) return "not PSD at " + tag(x, e, a);
        total += op;
      }
    }
    if ((total - id).cwiseAbs().maxCoeff() > tol) return "normalization fails for a=" + std::to_string(a);
    for (Index e = 0; e < no; ++e) {
      ComplexMatrix marg = ComplexMatrix::Zero(d, d);
      for (Index x = 0; x < no; ++x) marg += m.at(x, e, a);
      if ((marg - marg(0, 0) * id).cwiseAbs().maxCoeff() > tol) {
        return "marginal over x not proportional to identity for e=" + std::to_string(e) +
               ", a=" + std::to_string(a);
      }
    }
    for (Index x = 0; x < no; ++x) {
      ComplexMatrix here = ComplexMatrix::Zero(d, d), first = ComplexMatrix::Zero(d, d);
      for (Index e = 0; e < no; ++e) {
        here += m.at(x, e, a);
        first += m.at(x, e, 0);
      }
      if ((here - first).cwiseAbs().maxCoeff() > tol) {
        return "marginal over e depends on a for x=" + std::to_string(x) + ", a=" + std::to_string(a);
      }
      double p = 0.0;
      for (Index e = 0; e < no; ++e) p += (m.at(x, e, a) * s.ensemble[a].matrix()).trace().real();
      const double w = input_weight(s, a);
      if (std::abs(w * p - w * s.observed.conditional(x, a)) > tol) {
        return "statistics not reproduced for x=" + std::to_string(x) + ", a=" + std::to_string(a);
      }
    }
  }
  return {};
}

EffectiveStrategy honest_strategy(const Scenario& s, const Povm& device) {
  if (device.outcomes() != s.outcomes() || device.dim() != s.dim()) {
    throw std::invalid_argument("honest_strategy: device does not match the scenario");
  }
  EffectiveStrategy m(s.inputs(), s.outcomes(), s.dim());
  for (Index a = 0; a < s.inputs(); ++a) {
    Index guess = 0;
    s.observed.conditionals().row(a).maxCoeff(&guess);
    for (Index x = 0; x < s.outcomes(); ++x) m.at(x, guess, a) = device[x].matrix();
  }
  return m;
}

namespace {

// Columns of u spanning the eigenspaces of h with eigenvalue above cut.
ComplexMatrix range_basis(const ComplexMatrix& h, double cut, bool keep_large) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  std::vector<Index> cols;
  for (Index i = 0; i < h.rows(); ++i)
    if ((es.eigenvalues()(i) > cut) == keep_large) cols.push_back(i);
  ComplexMatrix out(h.rows(), static_cast<Index>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = es.eigenvectors().col(cols[j]);
  return out;
}

// Probabilities at or below this count as never observed.
constexpr double kZeroProbability = 1e-14;
// Eigenvalues of a uniquely determined N_x at or below this count as zero.
constexpr double kZeroEigenvalue = 1e-11;

}  // namespace

std::vector<ComplexMatrix> detector_support(const Scenario& s) {
  s.validate();
  const Index ns = s.inputs(), no = s.outcomes(), d = s.dim();
  std::vector<ComplexMatrix> u(static_cast<size_t>(no));
  for (Index x = 0; x < no; ++x) {
    ComplexMatrix w = ComplexMatrix::Zero(d, d);
    for (Index a = 0; a < ns; ++a)
      if (s.observed.conditional(x, a) <= kZeroProbability) w += s.ensemble[a].matrix();
    u[static_cast<size_t>(x)] = range_basis(w, 1e-12, false);
  }

  // N_x = U_x Y_x U_x^dagger with Y_x Hermitian; collect the linear map from
  // the real parameters of all Y_x to completeness and statistics.
  const auto full = hermitian_basis(d);
  std::vector<std::vector<ComplexMatrix>> params(static_cast<size_t>(no));
  Index nparam = 0;
  for (Index x = 0; x < no; ++x) {
    const ComplexMatrix& ux = u[static_cast<size_t>(x)];
    for (const auto& e : hermitian_basis(ux.cols())) params[static_cast<size_t>(x)].push_back(ux * e.b * 2.0 * ux.adjoint());
    nparam += static_cast<Index>(params[static_cast<size_t>(x)].size());
  }
  if (nparam == 0) return u;
  const Index neq = static_cast<Index>(full.size()) + ns * no;
  RealMatrix lin = RealMatrix::Zero(neq, nparam);
  RealVector rhs = RealVector::Zero(neq);
  Index col = 0;
  for (Index x = 0; x < no; ++x) {
    for (const auto& n : params[static_cast<size_t>(x)]) {
      for (size_t i = 0; i < full.size(); ++i) lin(static_cast<Index>(i), col) = (full[i].b * n).trace().real();
      for (Index a = 0; a < ns; ++a)
        lin(static_cast<Index>(full.size()) + a * no + x, col) = (n * s.ensemble[a].matrix()).trace().real();
      ++col;
    }
  }
  for (size_t i = 0; i < full.size(); ++i) rhs(static_cast<Index>(i)) = full[i].diagonal ? 1.0 : 0.0;
  for (Index a = 0; a < ns; ++a)
    for (Index x = 0; x < no; ++x) rhs(static_cast<Index>(full.size()) + a * no + x) = s.observed.conditional(x, a);

  Eigen::JacobiSVD<RealMatrix> svd(lin, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  if (lin.rows() < lin.cols() || sv(sv.size() - 1) <= 1e-9 * sv(0)) return u;
  const RealVector t = svd.solve(rhs);
  if ((lin * t - rhs).cwiseAbs().maxCoeff() > 1e-9) return u;  // inconsistent; leave it to the solver
  col = 0;
  for (Index x = 0; x < no; ++x) {
    ComplexMatrix n = ComplexMatrix::Zero(d, d);
    for (const auto& p : params[static_cast<size_t>(x)]) n += t(col++) * p;
    const ComplexMatrix& ux = u[static_cast<size_t>(x)];
    const ComplexMatrix y = ux.adjoint() * n * ux;
    u[static_cast<size_t>(x)] = ux * range_basis(0.5 * (y + y.adjoint()), kZeroEigenvalue, true);
  }
  return u;
}

MdiSdp build_sdp(const Scenario& s, double relax, const Tolerances& tol, bool restrict_face) {
  s.validate();
  if (!(relax >= 0.0) || !std::isfinite(relax)) {
    throw std::invalid_argument("build_sdp: relaxation must be a finite non-negative number");
  }
  const Index ns = s.inputs(), no = s.outcomes(), d = s.dim();
  MdiSdp out;
  SdpLayout& lay = out.layout;
  lay.inputs = ns;
  lay.outcomes = no;
  lay.dim = d;
  lay.normalization_rows = ns * d * d;
  lay.proportionality_rows = ns * no * (d * d - 1);
  lay.nonsignalling_rows = (ns - 1) * no * d * d;
  lay.statistics_rows = ns * no;
  lay.relaxation_rows = relax > 0.0 ? ns * no : 0;
  // The dense Gram matrix of the raw rows is formed during preprocessing.
  constexpr Index kMaxRawRows = 12000;
  if (lay.raw_rows() > kMaxRawRows || 2 * d > 64) {
    throw std::invalid_argument("build_sdp: scenario with d=" + std::to_string(d) + ", n_s=" +
                                std::to_string(ns) + ", n_o=" + std::to_string(no) + " has " +
                                std::to_string(lay.raw_rows()) + " raw constraints, beyond the size caps");
  }

  SdpProblem& p = out.problem;
  const Index nblocks = lay.strategy_blocks();
  p.block_sizes.assign(static_cast<size_t>(nblocks), 2 * d);
  if (relax > 0.0) p.block_sizes.resize(static_cast<size_t>(nblocks + 2 * lay.statistics_rows), 1);
  p.objective = zero_blocks(p.block_sizes);

  std::vector<RealMatrix> rho(static_cast<size_t>(ns));
  for (Index a = 0; a < ns; ++a) rho[static_cast<size_t>(a)] = pairing(s.ensemble[a].matrix());
  for (Index a = 0; a < ns; ++a) {
    const double w = objective_weight(s, a);
    if (w == 0.0) continue;
    for (Index x = 0; x < no; ++x) p.objective[static_cast<size_t>(lay.block(a, x, x))] = w * rho[static_cast<size_t>(a)];
  }

  const auto basis = hermitian_basis(d);
  std::vector<RealMatrix> coeff;
  for (const auto& e : basis) coeff.push_back(pairing(e.b));

  // Normalization.
  for (Index a = 0; a < ns; ++a) {
    CertificateGroup g;
    for (size_t bi = 0; bi < basis.size(); ++bi) {
      Constraint c;
      for (Index x = 0; x < no; ++x)
        for (Index e = 0; e < no; ++e) c.terms.push_back({lay.block(a, x, e), coeff[bi]});
      c.rhs = basis[bi].diagonal ? 1.0 : 0.0;
      if (basis[bi].diagonal) g.rows.emplace_back(p.num_constraints(), 2.0);
      p.constraints.push_back(std::move(c));
    }
    for (Index x = 0; x < no; ++x)
      for (Index e = 0; e < no; ++e) g.blocks.push_back(lay.block(a, x, e));
    p.certificate_groups.push_back(std::move(g));
  }

  // Proportionality: off-diagonal parts vanish, diagonal equals the (0,0) entry.
  for (Index a = 0; a < ns; ++a) {
    for (Index e = 0; e < no; ++e) {
      for (size_t bi = 0; bi < basis.size(); ++bi) {
        if (basis[bi].diagonal && basis[bi].j == 0) continue;
        const RealMatrix m = basis[bi].diagonal ? RealMatrix(coeff[bi] - coeff[0]) : coeff[bi];
        Constraint c;
        for (Index x = 0; x < no; ++x) c.terms.push_back({lay.block(a, x, e), m});
        p.constraints.push_back(std::move(c));
      }
    }
  }

  // Nonsignalling against input 0.
  for (Index a = 1; a < ns; ++a) {
    for (Index x = 0; x < no; ++x) {
      for (size_t bi = 0; bi < basis.size(); ++bi) {
        Constraint c;
        for (Index e = 0; e < no; ++e) c.terms.push_back({lay.block(a, x, e), coeff[bi]});
        for (Index e = 0; e < no; ++e) c.terms.push_back({lay.block(0, x, e), -coeff[bi]});
        p.constraints.push_back(std::move(c));
      }
    }
  }

  // Statistics, optionally widened by slack pairs s1 + s2 = 2 relax.
  const RealMatrix one = RealMatrix::Ones(1, 1);
  for (Index a = 0; a < ns; ++a) {
    const double w = input_weight(s, a);
    for (Index x = 0; x < no; ++x) {
      Constraint c;
      for (Index e = 0; e < no; ++e) c.terms.push_back({lay.block(a, x, e), w * rho[static_cast<size_t>(a)]});
      c.rhs = w * s.observed.conditional(x, a);
      if (relax > 0.0) {
        c.terms.push_back({nblocks + 2 * (a * no + x), one});
        c.rhs += relax;
      }
      p.constraints.push_back(std::move(c));
    }
  }
  if (relax > 0.0) {
    for (Index r = 0; r < lay.statistics_rows; ++r) {
      const Index s1 = nblocks + 2 * r;
      CertificateGroup g;
      g.rows.emplace_back(p.num_constraints(), 1.0);
      g.blocks = {s1, s1 + 1};
      p.constraints.push_back({{{s1, one}, {s1 + 1, one}}, 2.0 * relax});
      p.certificate_groups.push_back(std::move(g));
    }
  }

  if (restrict_face && relax == 0.0) {
    const auto support = detector_support(s);
    bool proper = false;
    for (const auto& ux : support) proper = proper || ux.cols() < d;
    if (proper) {
      std::vector<RealMatrix> bases;
      for (Index a = 0; a < ns; ++a)
        for (Index x = 0; x < no; ++x)
          for (Index e = 0; e < no; ++e) bases.push_back(real_embed(support[static_cast<size_t>(x)]));
      out.face = restrict_to_face(p, std::move(bases));
    }
  }
  out.reduced = preprocess(out.solved_problem(), tol);
  return out;
}

EffectiveStrategy strategy_from_primal(const SdpLayout& layout, const BlockMatrix& x) {
  EffectiveStrategy m(layout.inputs, layout.outcomes, layout.dim);
  for (Index a = 0; a < layout.inputs; ++a)
    for (Index xo = 0; xo < layout.outcomes; ++xo)
      for (Index e = 0; e < layout.outcomes; ++e)
        m.at(xo, e, a) = complex_from_embedding(x[static_cast<size_t>(layout.block(a, xo, e))]);
  return m;
}

double classical_min_entropy(const ObservedStatistics& stats) {
  double sum = 0.0;
  for (Index a = 0; a < stats.inputs(); ++a)
    sum += stats.input_probs()(a) * stats.conditionals().row(a).maxCoeff();
  return -log2_safe(sum);
}

double classical_min_entropy(const Scenario& s) {
  if (s.mode == RateMode::kAsymptoticAsymmetric)
    return -log2_safe(s.observed.conditionals().row(s.generation_index).maxCoeff());
  return classical_min_entropy(s.observed);
}

double input_cost(const RealVector& p) {
  check_distribution(p, "input_cost");
  double h = 0.0;
  for (Index a = 0; a < p.size(); ++a)
    if (p(a) > 0.0) h -= p(a) * std::log2(p(a));
  return h;
}

RateResult guessing_probability(const Scenario& s, const RateOptions& opts) {
  const MdiSdp sdp = build_sdp(s, opts.relax, opts.tol, opts.restrict_face);
  RateResult r;
  r.layout = sdp.layout;
  r.raw_constraints = sdp.problem.num_constraints();
  r.kept_constraints = sdp.reduced.problem.num_constraints();
  r.classical_bound_bits = classical_min_entropy(s);
  r.input_cost_bits = s.mode == RateMode::kFiniteQ ? input_cost(s.observed.input_probs()) : 0.0;

  r.solution = solve_certified(sdp.solved_problem(), sdp.reduced, opts.solver);
  r.face_restricted = sdp.face.has_value();
  if (sdp.face && !r.solution.x.empty()) r.solution.x = sdp.face->expand(r.solution.x);
  const SdpSolution& sol = r.solution;
  r.status = sol.status;
  r.primal_objective = sol.primal_objective;
  r.dual_objective = sol.dual_objective;
  r.certificate_shift = sol.certificate_shift;
  r.iterations = sol.iterations;
  r.diagnostics = sol.message;
  if (!usable(sol.status)) return r;

  double p = sol.certified_upper_bound;
  if (p > 1.0 + opts.tol.pguess_clamp) {
    r.clamped = true;
    r.diagnostics += "; certified bound " + std::to_string(p) + " exceeds 1, clamped";
  }
  p = std::min(p, 1.0);
  r.p_guess_upper = p;
  r.rate_bits = -std::log2(p);
  if (std::abs(r.rate_bits) < opts.tol.rate_clamp) r.rate_bits = 0.0;
  r.rate_per_qubit = r.rate_bits / std::log2(static_cast<double>(s.dim()));
  r.net_expansion_bits = r.rate_bits - r.input_cost_bits;
  return r;
}

Scenario double_scenario(const Scenario& s) {
  s.validate();
  Scenario out{double_ensemble(s.ensemble), double_statistics(s.observed), s.mode,
               s.generation_index * s.inputs() + s.generation_index};
  out.validate();
  return out;
}

TwoCopyResult two_copy_delta(const Scenario& s, const RateOptions& opts) {
  if (s.dim() > 4) throw std::invalid_argument("two_copy_delta: single-copy dimension above 4");
  TwoCopyResult out;
  out.single = guessing_probability(s, opts);
  out.doubled = guessing_probability(double_scenario(s), opts);
  if (out.single.ok() && out.doubled.ok()) out.delta = out.single.rate_bits - 0.5 * out.doubled.rate_bits;
  return out;
}

Scenario angle_scenario(double alpha, double eta, double q) {
  const auto [phi, psi] = angle_states(alpha);
  RealVector p(2);
  p << q, 1.0 - q;
  return honest_scenario(StateEnsemble({phi, psi}, p), sigma_x_povm(), eta, RateMode::kFiniteQ);
}

std::vector<std::pair<double, RateResult>> angle_sweep(const std::vector<double>& alphas, double eta,
                                                       double q, const RateOptions& opts) {
  std::vector<std::pair<double, RateResult>> out;
  for (double alpha : alphas) out.emplace_back(alpha, guessing_probability(angle_scenario(alpha, eta, q), opts));
  return out;
}

}  // namespace mdirand
