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
#include <string>
#include <utility>
#include <vector>

#include "mdirand/linalg.h"

namespace mdirand {

// Block-diagonal symmetric matrix, one dense block per entry.
using BlockMatrix = std::vector<RealMatrix>;

struct BlockTerm {
  Index block = 0;
  RealMatrix matrix;  // symmetric, sized like the block
};

// Equality row  sum_k <A_ik, X_k> = rhs.  Blocks not listed are zero.
struct Constraint {
  std::vector<BlockTerm> terms;
  double rhs = 0.0;
};

// sum_i coeff_i A_i is the identity on `blocks` and zero on every other block.
// Shifting the multipliers of such a group moves the dual slack by a multiple
// of the identity, which is what makes an approximate dual point certifiable.
struct CertificateGroup {
  std::vector<std::pair<Index, double>> rows;
  std::vector<Index> blocks;
};

// maximize <C, X>  subject to  <A_i, X> = b_i,  X >= 0 (block-diagonal).
// Dual: minimize b^T y subject to  sum_i y_i A_i - C >= 0.
struct SdpProblem {
  std::vector<Index> block_sizes;
  BlockMatrix objective;
  std::vector<Constraint> constraints;
  std::vector<CertificateGroup> certificate_groups;

  Index num_blocks() const { return static_cast<Index>(block_sizes.size()); }
  Index num_constraints() const { return static_cast<Index>(constraints.size()); }
  Index total_dim() const;
  RealVector rhs() const;

  // Throws std::invalid_argument on malformed shapes, out-of-range block
  // references, or blocks asymmetric beyond 1e-12.
  void validate() const;
};

BlockMatrix zero_blocks(const std::vector<Index>& sizes);
BlockMatrix identity_blocks(const std::vector<Index>& sizes, double scale = 1.0);
double inner(const BlockMatrix& a, const BlockMatrix& b);
double inner(const Constraint& c, const BlockMatrix& x);

// A(X)
RealVector apply_constraints(const SdpProblem& p, const BlockMatrix& x);
// sum_i y_i A_i
BlockMatrix apply_adjoint(const SdpProblem& p, const RealVector& y);
// sum_i y_i A_i - C
BlockMatrix dual_slack(const SdpProblem& p, const RealVector& y);

// For each block, the (row, term) pairs touching it, rows ascending.
std::vector<std::vector<std::pair<Index, Index>>> rows_by_block(const SdpProblem& p);

// Gram matrix <A_i, A_j> of the constraint rows.
RealMatrix constraint_gram(const SdpProblem& p);

enum class PreprocessStatus { kOk, kInfeasible };

struct DroppedRow {
  Index row = 0;            // index in the input problem
  double residual = 0.0;    // distance of the normalized row to the kept span
  double rhs_mismatch = 0.0;
};

struct Preprocessed {
  SdpProblem problem;            // independent rows scaled to unit norm
  std::vector<Index> kept;       // input row of each reduced row
  RealVector row_norms;          // Frobenius norm of each kept input row
  std::vector<DroppedRow> dropped;
  PreprocessStatus status = PreprocessStatus::kOk;
  Index offending_row = -1;
  std::string message;

  // Multipliers for the input problem reproducing the same dual slack.
  RealVector lift_dual(const RealVector& reduced_y, Index input_rows) const;
  std::string report() const;
};

// Removes linearly dependent rows (greedy, input order, distance <= tol.dedup
// after normalization), checks that their right-hand sides are consistent
// (within tol.consistency) and rescales the remaining rows to unit norm.
// Certificate groups survive only if all their rows are kept.
Preprocessed preprocess(const SdpProblem& p, const Tolerances& tol = default_tolerances());

// SDPA sparse format (.dat-s): the dual above is SDPA's primal with c = b,
// F_i = A_i and F_0 = C.
// Restriction of every block to a subspace, X_k = V_k Y_k V_k^T. Only valid
// when every feasible point is known to lie in that face; the optimum is
// then unchanged. Blocks with an empty basis are removed. Row indices are
// preserved, so certificate groups carry over (V^T I V = I).
struct FaceRestriction {
  SdpProblem problem;
  std::vector<RealMatrix> bases;  // per input block, orthonormal columns
  std::vector<Index> block_of;    // input block -> restricted block, -1 if removed

  BlockMatrix expand(const BlockMatrix& y) const;
};

FaceRestriction restrict_to_face(const SdpProblem& p, std::vector<RealMatrix> bases);

void write_sdpa(std::ostream& os, const SdpProblem& p);

}  // namespace mdirand
