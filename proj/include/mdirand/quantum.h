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

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "mdirand/linalg.h"

namespace mdirand {

// Largest Hilbert-space dimension handled anywhere in the library.
inline constexpr Index kMaxDim = 32;

// Pauli matrices. Bloch axis convention: e1 <-> sigma_x, e2 <-> sigma_y,
// e3 <-> sigma_z, so |+> lies along e1.
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// Unit trace, positive semidefinite operator.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(HermitianOperator op);
  static DensityMatrix pure(const ComplexVector& ket);

  Index dim() const { return op_.dim(); }
  const HermitianOperator& op() const { return op_; }
  const ComplexMatrix& matrix() const { return op_.matrix(); }

 private:
  HermitianOperator op_;
};

// Positive operators summing to the identity.
class Povm {
 public:
  Povm() = default;
  explicit Povm(std::vector<HermitianOperator> elements);

  Index dim() const { return elements_.empty() ? 0 : elements_.front().dim(); }
  Index outcomes() const { return static_cast<Index>(elements_.size()); }
  const std::vector<HermitianOperator>& elements() const { return elements_; }
  const HermitianOperator& operator[](Index x) const { return elements_[static_cast<size_t>(x)]; }

 private:
  std::vector<HermitianOperator> elements_;
};

// Qubit POVM written as alpha_k (I + m_k . sigma).
struct BlochPovmSpec {
  std::vector<double> weights;
  std::vector<Eigen::Vector3d> directions;

  Index outcomes() const { return static_cast<Index>(weights.size()); }
  // Empty when all invariants hold, otherwise a description of the first failure.
  std::string invariant_violation() const;
};

class StateEnsemble {
 public:
  StateEnsemble() = default;
  StateEnsemble(std::vector<DensityMatrix> states, RealVector input_probs);
  // Uniform input distribution.
  explicit StateEnsemble(std::vector<DensityMatrix> states);

  Index dim() const { return states_.empty() ? 0 : states_.front().dim(); }
  Index size() const { return static_cast<Index>(states_.size()); }
  const std::vector<DensityMatrix>& states() const { return states_; }
  const DensityMatrix& operator[](Index a) const { return states_[static_cast<size_t>(a)]; }
  const RealVector& input_probs() const { return probs_; }

  StateEnsemble with_input_probs(RealVector probs) const;

 private:
  std::vector<DensityMatrix> states_;
  RealVector probs_;
};

// Conditional outcome table P(x|a) (rows a, columns x) with the input
// distribution p_a. Joint values are p_a P(x|a).
class ObservedStatistics {
 public:
  ObservedStatistics() = default;
  // Entries in (-stats_row, 0) are clipped to zero and the row renormalized;
  // anything larger is rejected, as are rows not summing to one.
  ObservedStatistics(RealMatrix conditionals, RealVector input_probs);

  Index inputs() const { return cond_.rows(); }
  Index outcomes() const { return cond_.cols(); }
  const RealMatrix& conditionals() const { return cond_; }
  const RealVector& input_probs() const { return probs_; }
  double conditional(Index x, Index a) const { return cond_(a, x); }
  double joint(Index x, Index a) const { return probs_(a) * cond_(a, x); }

  ObservedStatistics with_input_probs(RealVector probs) const;

 private:
  RealMatrix cond_;
  RealVector probs_;
};

// Validates a probability vector (non-negative, sums to one); throws otherwise.
void check_distribution(const RealVector& p, const char* what);

DensityMatrix bloch_to_density(const Eigen::Vector3d& r);
Povm povm_from_bloch(const BlochPovmSpec& spec);

// Maximally symmetric 4-outcome qubit POVM, unbiased on |+>.
BlochPovmSpec extremal4();
// 3-outcome qubit POVM with directions orthogonal to e1.
BlochPovmSpec extremal3();
BlochPovmSpec sigma_z_spec();
BlochPovmSpec sigma_x_spec();

Povm sigma_z_povm();
Povm sigma_x_povm();

// alpha_k (1 + m_k . e1) == 1/n_o for every k.
bool check_unbiased(const BlochPovmSpec& spec, Index n_o);

struct ExtremalityReport {
  bool rank_one = false;     // every |m_k| == 1
  bool independent = false;  // elements linearly independent as operators
  Index operator_rank = 0;
  bool coplanar = false;     // four directions sharing an affine plane
  bool ok() const { return rank_one && independent; }
  std::string diagnosis() const;
};
ExtremalityReport extremality(const BlochPovmSpec& spec);
bool check_extremal(const BlochPovmSpec& spec);

// Rank-one elements that are linearly independent, any dimension.
ExtremalityReport extremality(const Povm& povm);

// Bloch decomposition alpha_k = tr(E_k)/2, m_k = tr(E_k sigma)/(2 alpha_k) of
// a qubit POVM. Throws for non-qubit POVMs or zero elements.
BlochPovmSpec bloch_decomposition(const Povm& povm);

// {|+>, |0>, |1>, |+i>}, in this order.
std::vector<DensityMatrix> tomographic_set();

// sqrt(1 - alpha/2)|0> +/- sqrt(alpha/2)|1>; overlap 1 - alpha.
std::pair<DensityMatrix, DensityMatrix> angle_states(double alpha);

// All m-fold products, row-major in the copy index (first copy slowest).
StateEnsemble tensor_ensemble(const StateEnsemble& base, int m);
Povm tensor_povm(const Povm& base, int m);

// P(x|a) = tr(Pi_x rho(a)) with the ensemble's input distribution.
ObservedStatistics honest_statistics(const StateEnsemble& ens, const Povm& povm);

// eta P(x|a) + (1 - eta)/n_o.
ObservedStatistics mix_white_noise(const ObservedStatistics& stats, double eta);

// Two independent copies; pair (i, j) maps to index i * n + j.
ObservedStatistics double_statistics(const ObservedStatistics& stats);
StateEnsemble double_ensemble(const StateEnsemble& ens);

// Noisy honest POVM eta Pi_x + (1 - eta) I/n_o.
Povm mix_white_noise(const Povm& povm, double eta);

}  // namespace mdirand
