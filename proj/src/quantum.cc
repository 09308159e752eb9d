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

#include "mdirand/quantum.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mdirand {
namespace {

const Complex kI(0.0, 1.0);

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_dim_cap(Index dim, const char* what) {
  if (dim > kMaxDim) {
    throw std::invalid_argument(std::string(what) + ": dimension " + std::to_string(dim) +
                                " exceeds the cap of " + std::to_string(kMaxDim));
  }
}

Index int_pow(Index base, int m) {
  Index out = 1;
  for (int i = 0; i < m; ++i) out *= base;
  return out;
}

// Numerical rank from singular values, relative threshold.
Index numerical_rank(const RealMatrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<RealMatrix> svd(m);
  const RealVector& s = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++rank;
  return rank;
}

}  // namespace

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

DensityMatrix::DensityMatrix(HermitianOperator op) : op_(std::move(op)) {
  const auto& tol = default_tolerances();
  if (op_.dim() == 0) throw std::invalid_argument("DensityMatrix: empty operator");
  check_dim_cap(op_.dim(), "DensityMatrix");
  if (std::abs(op_.trace() - 1.0) > tol.trace) {
    throw std::invalid_argument("DensityMatrix: trace " + fmt(op_.trace()) + " is not 1");
  }
  const double lmin = min_eigenvalue(op_);
  if (lmin < -tol.psd) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue " + fmt(lmin));
  }
}

DensityMatrix DensityMatrix::pure(const ComplexVector& ket) {
  const double norm = ket.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("DensityMatrix::pure: zero vector");
  const ComplexVector k = ket / norm;
  return DensityMatrix(HermitianOperator(k * k.adjoint()));
}

Povm::Povm(std::vector<HermitianOperator> elements) : elements_(std::move(elements)) {
  const auto& tol = default_tolerances();
  if (elements_.empty()) throw std::invalid_argument("Povm: no elements");
  const Index d = elements_.front().dim();
  if (d == 0) throw std::invalid_argument("Povm: empty elements");
  check_dim_cap(d, "Povm");
  ComplexMatrix sum = ComplexMatrix::Zero(d, d);
  for (size_t k = 0; k < elements_.size(); ++k) {
    const auto& e = elements_[k];
    if (e.dim() != d) throw std::invalid_argument("Povm: elements have different dimensions");
    const double lmin = min_eigenvalue(e);
    if (lmin < -tol.psd) {
      throw std::invalid_argument("Povm: element " + std::to_string(k) +
                                  " has negative eigenvalue " + fmt(lmin));
    }
    sum += e.matrix();
  }
  const double dev = (sum - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > tol.completeness) {
    throw std::invalid_argument("Povm: elements sum to identity only within " + fmt(dev));
  }
}

std::string BlochPovmSpec::invariant_violation() const {
  const auto& tol = default_tolerances();
  if (weights.empty()) return "no outcomes";
  if (weights.size() != directions.size()) return "weights and directions differ in length";
  double total = 0.0;
  Eigen::Vector3d balance = Eigen::Vector3d::Zero();
  for (size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0)) return "weight " + std::to_string(k) + " is not positive";
    if (!directions[k].allFinite()) return "direction " + std::to_string(k) + " is not finite";
    if (directions[k].norm() > 1.0 + tol.bloch_norm) {
      return "direction " + std::to_string(k) + " has norm " + fmt(directions[k].norm()) + " > 1";
    }
    total += weights[k];
    balance += weights[k] * directions[k];
  }
  if (std::abs(total - 1.0) > tol.bloch_weights) return "weights sum to " + fmt(total);
  if (balance.norm() > tol.bloch_balance) {
    return "weighted directions do not cancel (residual " + fmt(balance.norm()) + ")";
  }
  return {};
}

StateEnsemble::StateEnsemble(std::vector<DensityMatrix> states, RealVector input_probs)
    : states_(std::move(states)), probs_(std::move(input_probs)) {
  if (states_.empty()) throw std::invalid_argument("StateEnsemble: no states");
  for (const auto& s : states_) {
    if (s.dim() != states_.front().dim()) {
      throw std::invalid_argument("StateEnsemble: states have different dimensions");
    }
  }
  if (probs_.size() != size()) {
    throw std::invalid_argument("StateEnsemble: " + std::to_string(probs_.size()) +
                                " input probabilities for " + std::to_string(size()) + " states");
  }
  check_distribution(probs_, "StateEnsemble input distribution");
}

StateEnsemble::StateEnsemble(std::vector<DensityMatrix> states)
    : StateEnsemble(states,
                    RealVector::Constant(static_cast<Index>(states.size()),
                                         1.0 / static_cast<double>(std::max<size_t>(states.size(), 1)))) {}

StateEnsemble StateEnsemble::with_input_probs(RealVector probs) const {
  return StateEnsemble(states_, std::move(probs));
}

void check_distribution(const RealVector& p, const char* what) {
  const auto& tol = default_tolerances();
  if (p.size() == 0) throw std::invalid_argument(std::string(what) + ": empty");
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p(i)) || p(i) < 0.0) {
      throw std::invalid_argument(std::string(what) + ": entry " + std::to_string(i) +
                                  " is " + fmt(p(i)));
    }
  }
  if (std::abs(p.sum() - 1.0) > tol.distribution) {
    throw std::invalid_argument(std::string(what) + ": sums to " + fmt(p.sum()));
  }
}

ObservedStatistics::ObservedStatistics(RealMatrix conditionals, RealVector input_probs)
    : cond_(std::move(conditionals)), probs_(std::move(input_probs)) {
  const auto& tol = default_tolerances();
  if (cond_.rows() == 0 || cond_.cols() == 0) throw std::invalid_argument("ObservedStatistics: empty table");
  if (probs_.size() != cond_.rows()) {
    throw std::invalid_argument("ObservedStatistics: " + std::to_string(probs_.size()) +
                                " input probabilities for " + std::to_string(cond_.rows()) + " rows");
  }
  check_distribution(probs_, "ObservedStatistics input distribution");
  for (Index a = 0; a < cond_.rows(); ++a) {
    for (Index x = 0; x < cond_.cols(); ++x) {
      const double v = cond_(a, x);
      if (!std::isfinite(v) || v < -tol.stats_row) {
        throw std::invalid_argument("ObservedStatistics: P(x=" + std::to_string(x) + "|a=" +
                                    std::to_string(a) + ") = " + fmt(v));
      }
      if (v < 0.0) cond_(a, x) = 0.0;
    }
    const double sum = cond_.row(a).sum();
    if (std::abs(sum - 1.0) > tol.stats_row) {
      throw std::invalid_argument("ObservedStatistics: row a=" + std::to_string(a) + " sums to " +
                                  fmt(sum));
    }
    cond_.row(a) /= sum;
  }
}

ObservedStatistics ObservedStatistics::with_input_probs(RealVector probs) const {
  return ObservedStatistics(cond_, std::move(probs));
}

DensityMatrix bloch_to_density(const Eigen::Vector3d& r) {
  if (!r.allFinite() || r.norm() > 1.0 + default_tolerances().bloch_norm) {
    throw std::invalid_argument("invalid Bloch vector: norm " + fmt(r.norm()) + " > 1");
  }
  const ComplexMatrix rho = 0.5 * (ComplexMatrix::Identity(2, 2) + r(0) * pauli_x() +
                                   r(1) * pauli_y() + r(2) * pauli_z());
  return DensityMatrix(HermitianOperator(rho));
}

Povm povm_from_bloch(const BlochPovmSpec& spec) {
  if (auto why = spec.invariant_violation(); !why.empty()) {
    throw std::invalid_argument("BlochPovmSpec: " + why);
  }
  std::vector<HermitianOperator> elements;
  for (size_t k = 0; k < spec.weights.size(); ++k) {
    const auto& m = spec.directions[k];
    elements.emplace_back(spec.weights[k] * (ComplexMatrix::Identity(2, 2) + m(0) * pauli_x() +
                                             m(1) * pauli_y() + m(2) * pauli_z()));
  }
  return Povm(std::move(elements));
}

BlochPovmSpec extremal4() {
  const double s3 = std::sqrt(3.0);
  BlochPovmSpec spec;
  spec.weights = {1.0 / 8.0, 7.0 / 24.0, 7.0 / 24.0, 7.0 / 24.0};
  spec.directions = {
      Eigen::Vector3d(1.0, 0.0, 0.0),
      Eigen::Vector3d(-1.0 / 7.0, 4.0 * s3 / 7.0, 0.0),
      Eigen::Vector3d(-1.0 / 7.0, -2.0 * s3 / 7.0, 6.0 / 7.0),
      Eigen::Vector3d(-1.0 / 7.0, -2.0 * s3 / 7.0, -6.0 / 7.0),
  };
  return spec;
}

BlochPovmSpec extremal3() {
  const double s3 = std::sqrt(3.0);
  BlochPovmSpec spec;
  spec.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  spec.directions = {
      Eigen::Vector3d(0.0, 1.0, 0.0),
      Eigen::Vector3d(0.0, -0.5, s3 / 2.0),
      Eigen::Vector3d(0.0, -0.5, -s3 / 2.0),
  };
  return spec;
}

BlochPovmSpec sigma_z_spec() {
  return {{0.5, 0.5}, {Eigen::Vector3d(0, 0, 1), Eigen::Vector3d(0, 0, -1)}};
}

BlochPovmSpec sigma_x_spec() {
  return {{0.5, 0.5}, {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0)}};
}

Povm sigma_z_povm() { return povm_from_bloch(sigma_z_spec()); }
Povm sigma_x_povm() { return povm_from_bloch(sigma_x_spec()); }

bool check_unbiased(const BlochPovmSpec& spec, Index n_o) {
  if (spec.outcomes() != n_o || n_o == 0) return false;
  for (size_t k = 0; k < spec.weights.size(); ++k) {
    const double bias = spec.weights[k] * (1.0 + spec.directions[k](0));
    if (std::abs(bias - 1.0 / static_cast<double>(n_o)) > 1e-10) return false;
  }
  return true;
}

std::string ExtremalityReport::diagnosis() const {
  if (ok()) return "extremal";
  std::string out;
  if (!rank_one) out += "elements not rank-one";
  if (!independent) {
    if (!out.empty()) out += "; ";
    out += coplanar ? "coplanar directions (elements linearly dependent)"
                    : "elements linearly dependent (operator rank " +
                          std::to_string(operator_rank) + ")";
  }
  return out;
}

ExtremalityReport extremality(const BlochPovmSpec& spec) {
  const auto& tol = default_tolerances();
  ExtremalityReport rep;
  const Index n = spec.outcomes();
  rep.rank_one = n > 0;
  RealMatrix vecs(4, n);
  for (Index k = 0; k < n; ++k) {
    const auto& m = spec.directions[static_cast<size_t>(k)];
    if (std::abs(m.norm() - 1.0) > tol.unit_direction) rep.rank_one = false;
    vecs(0, k) = 1.0;
    vecs.col(k).tail<3>() = m;
    vecs.col(k) *= spec.weights[static_cast<size_t>(k)];
  }
  rep.operator_rank = numerical_rank(vecs, 1e-10);
  rep.independent = n <= 4 && rep.operator_rank == n;
  rep.coplanar = n == 4 && !rep.independent;
  return rep;
}

bool check_extremal(const BlochPovmSpec& spec) { return extremality(spec).ok(); }

ExtremalityReport extremality(const Povm& povm) {
  ExtremalityReport rep;
  const Index n = povm.outcomes();
  const Index d = povm.dim();
  rep.rank_one = n > 0;
  RealMatrix vecs(2 * d * d, n);
  for (Index k = 0; k < n; ++k) {
    const RealVector ev = eigenvalues(povm[k]);
    if (d > 1 && ev(d - 2) > 1e-10 * std::max(1.0, ev(d - 1))) rep.rank_one = false;
    const ComplexMatrix& m = povm[k].matrix();
    for (Index i = 0; i < d * d; ++i) {
      vecs(i, k) = m(i % d, i / d).real();
      vecs(d * d + i, k) = m(i % d, i / d).imag();
    }
  }
  rep.operator_rank = numerical_rank(vecs, 1e-10);
  rep.independent = n <= d * d && rep.operator_rank == n;
  rep.coplanar = d == 2 && n == 4 && !rep.independent;
  return rep;
}

BlochPovmSpec bloch_decomposition(const Povm& povm) {
  if (povm.dim() != 2) throw std::invalid_argument("bloch_decomposition: not a qubit POVM");
  BlochPovmSpec spec;
  const ComplexMatrix paulis[3] = {pauli_x(), pauli_y(), pauli_z()};
  for (const auto& e : povm.elements()) {
    const double alpha = e.trace() / 2.0;
    if (!(alpha > 0.0)) throw std::invalid_argument("bloch_decomposition: zero element");
    Eigen::Vector3d m;
    for (int c = 0; c < 3; ++c) m(c) = (e.matrix() * paulis[c]).trace().real() / (2.0 * alpha);
    spec.weights.push_back(alpha);
    spec.directions.push_back(m);
  }
  return spec;
}

std::vector<DensityMatrix> tomographic_set() {
  return {bloch_to_density({1, 0, 0}), bloch_to_density({0, 0, 1}),
          bloch_to_density({0, 0, -1}), bloch_to_density({0, 1, 0})};
}

std::pair<DensityMatrix, DensityMatrix> angle_states(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("angle_states: alpha " + fmt(alpha) + " outside [0, 1]");
  }
  const double c0 = std::sqrt(1.0 - alpha / 2.0);
  const double c1 = std::sqrt(alpha / 2.0);
  ComplexVector phi(2), psi(2);
  phi << c0, c1;
  psi << c0, -c1;
  return {DensityMatrix::pure(phi), DensityMatrix::pure(psi)};
}

StateEnsemble tensor_ensemble(const StateEnsemble& base, int m) {
  if (m < 1) throw std::invalid_argument("tensor_ensemble: m must be >= 1");
  check_dim_cap(int_pow(base.dim(), m), "tensor_ensemble");
  std::vector<DensityMatrix> states = base.states();
  RealVector probs = base.input_probs();
  for (int c = 1; c < m; ++c) {
    std::vector<DensityMatrix> next;
    RealVector next_probs(probs.size() * base.size());
    for (Index i = 0; i < static_cast<Index>(states.size()); ++i) {
      for (Index j = 0; j < base.size(); ++j) {
        next.emplace_back(kron(states[static_cast<size_t>(i)].op(), base[j].op()));
        next_probs(i * base.size() + j) = probs(i) * base.input_probs()(j);
      }
    }
    states = std::move(next);
    probs = std::move(next_probs);
  }
  // products of a normalized distribution can drift by an ulp or two
  probs /= probs.sum();
  return StateEnsemble(std::move(states), std::move(probs));
}

Povm tensor_povm(const Povm& base, int m) {
  if (m < 1) throw std::invalid_argument("tensor_povm: m must be >= 1");
  check_dim_cap(int_pow(base.dim(), m), "tensor_povm");
  std::vector<HermitianOperator> elements = base.elements();
  for (int c = 1; c < m; ++c) {
    std::vector<HermitianOperator> next;
    for (const auto& e : elements)
      for (const auto& f : base.elements()) next.push_back(kron(e, f));
    elements = std::move(next);
  }
  return Povm(std::move(elements));
}

ObservedStatistics honest_statistics(const StateEnsemble& ens, const Povm& povm) {
  if (ens.dim() != povm.dim()) {
    throw std::invalid_argument("honest_statistics: state dimension " + std::to_string(ens.dim()) +
                                " vs POVM dimension " + std::to_string(povm.dim()));
  }
  RealMatrix cond(ens.size(), povm.outcomes());
  for (Index a = 0; a < ens.size(); ++a)
    for (Index x = 0; x < povm.outcomes(); ++x) cond(a, x) = trace_product(povm[x], ens[a].op());
  return ObservedStatistics(std::move(cond), ens.input_probs());
}

ObservedStatistics mix_white_noise(const ObservedStatistics& stats, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("mix_white_noise: eta " + fmt(eta) + " outside [0, 1]");
  }
  const double floor = (1.0 - eta) / static_cast<double>(stats.outcomes());
  RealMatrix cond = (eta * stats.conditionals().array() + floor).matrix();
  return ObservedStatistics(std::move(cond), stats.input_probs());
}

Povm mix_white_noise(const Povm& povm, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("mix_white_noise: eta " + fmt(eta) + " outside [0, 1]");
  }
  const double floor = (1.0 - eta) / static_cast<double>(povm.outcomes());
  std::vector<HermitianOperator> elements;
  for (const auto& e : povm.elements())
    elements.push_back(eta * e + floor * HermitianOperator::identity(povm.dim()));
  return Povm(std::move(elements));
}

ObservedStatistics double_statistics(const ObservedStatistics& stats) {
  const Index ns = stats.inputs();
  const Index no = stats.outcomes();
  RealMatrix cond(ns * ns, no * no);
  RealVector probs(ns * ns);
  for (Index a1 = 0; a1 < ns; ++a1) {
    for (Index a2 = 0; a2 < ns; ++a2) {
      probs(a1 * ns + a2) = stats.input_probs()(a1) * stats.input_probs()(a2);
      for (Index x1 = 0; x1 < no; ++x1)
        for (Index x2 = 0; x2 < no; ++x2)
          cond(a1 * ns + a2, x1 * no + x2) = stats.conditionals()(a1, x1) * stats.conditionals()(a2, x2);
    }
  }
  probs /= probs.sum();
  return ObservedStatistics(std::move(cond), std::move(probs));
}

StateEnsemble double_ensemble(const StateEnsemble& ens) { return tensor_ensemble(ens, 2); }

}  // namespace mdirand
