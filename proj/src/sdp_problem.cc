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

#include "mdirand/sdp_problem.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mdirand {

Index SdpProblem::total_dim() const {
  Index n = 0;
  for (Index s : block_sizes) n += s;
  return n;
}

RealVector SdpProblem::rhs() const {
  RealVector b(num_constraints());
  for (Index i = 0; i < num_constraints(); ++i) b(i) = constraints[static_cast<size_t>(i)].rhs;
  return b;
}

void SdpProblem::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("SdpProblem: " + what); };
  auto check_block = [&](const RealMatrix& m, Index k, const std::string& who) {
    const Index s = block_sizes[static_cast<size_t>(k)];
    if (m.rows() != s || m.cols() != s) fail(who + ": block " + std::to_string(k) + " has wrong size");
    if (!m.allFinite()) fail(who + ": non-finite entry in block " + std::to_string(k));
    if (s > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
      fail(who + ": block " + std::to_string(k) + " is not symmetric");
    }
  };
  for (Index s : block_sizes)
    if (s <= 0) fail("non-positive block size");
  if (objective.size() != block_sizes.size()) fail("objective has wrong number of blocks");
  for (Index k = 0; k < num_blocks(); ++k) check_block(objective[static_cast<size_t>(k)], k, "objective");
  for (Index i = 0; i < num_constraints(); ++i) {
    const auto& c = constraints[static_cast<size_t>(i)];
    const std::string who = "constraint " + std::to_string(i);
    if (!std::isfinite(c.rhs)) fail(who + ": non-finite right-hand side");
    std::vector<Index> seen;
    for (const auto& t : c.terms) {
      if (t.block < 0 || t.block >= num_blocks()) fail(who + ": block index out of range");
      if (std::find(seen.begin(), seen.end(), t.block) != seen.end()) fail(who + ": repeated block");
      seen.push_back(t.block);
      check_block(t.matrix, t.block, who);
    }
  }
  for (const auto& g : certificate_groups) {
    for (const auto& [row, coeff] : g.rows)
      if (row < 0 || row >= num_constraints() || !std::isfinite(coeff)) fail("bad certificate group row");
    for (Index k : g.blocks)
      if (k < 0 || k >= num_blocks()) fail("bad certificate group block");
  }
}

BlockMatrix zero_blocks(const std::vector<Index>& sizes) {
  BlockMatrix out;
  out.reserve(sizes.size());
  for (Index s : sizes) out.push_back(RealMatrix::Zero(s, s));
  return out;
}

BlockMatrix identity_blocks(const std::vector<Index>& sizes, double scale) {
  BlockMatrix out;
  out.reserve(sizes.size());
  for (Index s : sizes) out.push_back(scale * RealMatrix::Identity(s, s));
  return out;
}

double inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double inner(const Constraint& c, const BlockMatrix& x) {
  double s = 0.0;
  for (const auto& t : c.terms) s += t.matrix.cwiseProduct(x[static_cast<size_t>(t.block)]).sum();
  return s;
}

RealVector apply_constraints(const SdpProblem& p, const BlockMatrix& x) {
  RealVector out(p.num_constraints());
  for (Index i = 0; i < p.num_constraints(); ++i) out(i) = inner(p.constraints[static_cast<size_t>(i)], x);
  return out;
}

BlockMatrix apply_adjoint(const SdpProblem& p, const RealVector& y) {
  BlockMatrix out = zero_blocks(p.block_sizes);
  for (Index i = 0; i < p.num_constraints(); ++i) {
    if (y(i) == 0.0) continue;
    for (const auto& t : p.constraints[static_cast<size_t>(i)].terms)
      out[static_cast<size_t>(t.block)].noalias() += y(i) * t.matrix;
  }
  return out;
}

BlockMatrix dual_slack(const SdpProblem& p, const RealVector& y) {
  BlockMatrix z = apply_adjoint(p, y);
  for (size_t k = 0; k < z.size(); ++k) z[k] -= p.objective[k];
  return z;
}

std::vector<std::vector<std::pair<Index, Index>>> rows_by_block(const SdpProblem& p) {
  std::vector<std::vector<std::pair<Index, Index>>> out(static_cast<size_t>(p.num_blocks()));
  for (Index i = 0; i < p.num_constraints(); ++i) {
    const auto& terms = p.constraints[static_cast<size_t>(i)].terms;
    for (Index t = 0; t < static_cast<Index>(terms.size()); ++t)
      out[static_cast<size_t>(terms[static_cast<size_t>(t)].block)].emplace_back(i, t);
  }
  return out;
}

RealMatrix constraint_gram(const SdpProblem& p) {
  const Index m = p.num_constraints();
  RealMatrix g = RealMatrix::Zero(m, m);
  const auto by_block = rows_by_block(p);
  for (Index k = 0; k < p.num_blocks(); ++k) {
    const auto& touching = by_block[static_cast<size_t>(k)];
    if (touching.empty()) continue;
    const Index s = p.block_sizes[static_cast<size_t>(k)];
    const Index c = static_cast<Index>(touching.size());
    RealMatrix v(s * s, c);
    for (Index j = 0; j < c; ++j) {
      const auto& [row, term] = touching[static_cast<size_t>(j)];
      v.col(j) = p.constraints[static_cast<size_t>(row)].terms[static_cast<size_t>(term)].matrix.reshaped();
    }
    const RealMatrix local = v.transpose() * v;
    for (Index a = 0; a < c; ++a)
      for (Index b = 0; b < c; ++b)
        g(touching[static_cast<size_t>(a)].first, touching[static_cast<size_t>(b)].first) += local(a, b);
  }
  return g;
}

RealVector Preprocessed::lift_dual(const RealVector& reduced_y, Index input_rows) const {
  RealVector y = RealVector::Zero(input_rows);
  for (size_t r = 0; r < kept.size(); ++r)
    y(kept[r]) = reduced_y(static_cast<Index>(r)) / row_norms(static_cast<Index>(r));
  return y;
}

std::string Preprocessed::report() const {
  std::ostringstream os;
  os << "kept " << kept.size() << " rows, dropped " << dropped.size();
  if (!dropped.empty()) {
    os << " (";
    for (size_t i = 0; i < dropped.size(); ++i) os << (i ? " " : "") << dropped[i].row;
    os << ")";
  }
  if (status == PreprocessStatus::kInfeasible) os << "; infeasible: " << message;
  return os.str();
}

Preprocessed preprocess(const SdpProblem& p, const Tolerances& tol) {
  p.validate();
  const Index m = p.num_constraints();
  Preprocessed out;

  RealVector norms(m);
  for (Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (const auto& t : p.constraints[static_cast<size_t>(i)].terms) s += t.matrix.squaredNorm();
    norms(i) = std::sqrt(s);
  }

  // Normalized copy of the nonzero rows.
  SdpProblem scaled;
  scaled.block_sizes = p.block_sizes;
  scaled.objective = p.objective;
  std::vector<Index> nonzero;
  for (Index i = 0; i < m; ++i) {
    const auto& c = p.constraints[static_cast<size_t>(i)];
    if (norms(i) <= tol.dedup) {
      out.dropped.push_back({i, norms(i), std::abs(c.rhs)});
      if (std::abs(c.rhs) > tol.consistency && out.status == PreprocessStatus::kOk) {
        out.status = PreprocessStatus::kInfeasible;
        out.offending_row = i;
        out.message = "row " + std::to_string(i) + " is zero but has right-hand side " +
                      std::to_string(c.rhs);
      }
      continue;
    }
    Constraint sc = c;
    for (auto& t : sc.terms) t.matrix /= norms(i);
    sc.rhs /= norms(i);
    scaled.constraints.push_back(std::move(sc));
    nonzero.push_back(i);
  }

  const RealMatrix gram = constraint_gram(scaled);
  // Cholesky pivots carry rounding of order m * eps; rows closer than that to
  // the kept span are confirmed below by recomputing the residual exactly.
  const double pivot_tol = std::max(tol.dedup * tol.dedup, 1e-12);
  RowSpaceBasis basis = row_space_basis_from_gram(gram, pivot_tol);

  // Exact residuals of the dropped rows; rows that do not reconstruct within
  // tol.dedup are kept after all.
  std::vector<Index> offsets(scaled.block_sizes.size() + 1, 0);
  for (size_t k = 0; k < scaled.block_sizes.size(); ++k)
    offsets[k + 1] = offsets[k] + scaled.block_sizes[k] * scaled.block_sizes[k];
  RealVector acc(offsets.back());
  auto add_row = [&](Index row, double coeff) {
    for (const auto& t : scaled.constraints[static_cast<size_t>(row)].terms)
      acc.segment(offsets[static_cast<size_t>(t.block)], t.matrix.size()) += coeff * t.matrix.reshaped();
  };
  std::vector<char> keep(scaled.constraints.size(), 0);
  for (Index r : basis.kept) keep[static_cast<size_t>(r)] = 1;
  for (size_t j = 0; j < basis.dropped.size(); ++j) {
    const Index d = basis.dropped[j];
    acc.setZero();
    add_row(d, 1.0);
    double rhs = scaled.constraints[static_cast<size_t>(d)].rhs;
    for (size_t a = 0; a < basis.kept.size(); ++a) {
      const double c = basis.coefficients(static_cast<Index>(a), static_cast<Index>(j));
      if (c == 0.0) continue;
      add_row(basis.kept[a], -c);
      rhs -= c * scaled.constraints[static_cast<size_t>(basis.kept[a])].rhs;
    }
    const double residual = acc.norm();
    if (residual > tol.dedup) {
      keep[static_cast<size_t>(d)] = 1;
      continue;
    }
    const Index input_row = nonzero[static_cast<size_t>(d)];
    out.dropped.push_back({input_row, residual, std::abs(rhs)});
    if (std::abs(rhs) > tol.consistency && out.status == PreprocessStatus::kOk) {
      out.status = PreprocessStatus::kInfeasible;
      out.offending_row = input_row;
      out.message = "row " + std::to_string(input_row) +
                    " depends on earlier rows but its right-hand side differs by " +
                    std::to_string(std::abs(rhs));
    }
  }
  std::sort(out.dropped.begin(), out.dropped.end(),
            [](const DroppedRow& a, const DroppedRow& b) { return a.row < b.row; });

  std::vector<Index> reduced_of_input(static_cast<size_t>(m), -1);
  out.problem.block_sizes = p.block_sizes;
  out.problem.objective = p.objective;
  std::vector<double> kept_norms;
  for (size_t r = 0; r < scaled.constraints.size(); ++r) {
    if (!keep[r]) continue;
    const Index input_row = nonzero[r];
    reduced_of_input[static_cast<size_t>(input_row)] = static_cast<Index>(out.kept.size());
    out.kept.push_back(input_row);
    kept_norms.push_back(norms(input_row));
    out.problem.constraints.push_back(std::move(scaled.constraints[r]));
  }
  out.row_norms = Eigen::Map<const RealVector>(kept_norms.data(), static_cast<Index>(kept_norms.size()));

  for (const auto& g : p.certificate_groups) {
    CertificateGroup mapped;
    mapped.blocks = g.blocks;
    bool complete = true;
    for (const auto& [row, coeff] : g.rows) {
      const Index r = reduced_of_input[static_cast<size_t>(row)];
      if (r < 0) {
        complete = false;
        break;
      }
      mapped.rows.emplace_back(r, coeff * norms(row));
    }
    if (complete) out.problem.certificate_groups.push_back(std::move(mapped));
  }
  return out;
}

FaceRestriction restrict_to_face(const SdpProblem& p, std::vector<RealMatrix> bases) {
  p.validate();
  if (static_cast<Index>(bases.size()) != p.num_blocks()) {
    throw std::invalid_argument("restrict_to_face: need one basis per block");
  }
  FaceRestriction out;
  out.block_of.assign(bases.size(), -1);
  for (size_t k = 0; k < bases.size(); ++k) {
    const RealMatrix& v = bases[k];
    if (v.rows() != p.block_sizes[k]) throw std::invalid_argument("restrict_to_face: basis has the wrong height");
    if (v.cols() > 0 && (v.transpose() * v - RealMatrix::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff() > 1e-10) {
      throw std::invalid_argument("restrict_to_face: basis columns are not orthonormal");
    }
    if (v.cols() == 0) continue;
    out.block_of[k] = out.problem.num_blocks();
    out.problem.block_sizes.push_back(v.cols());
    RealMatrix c = v.transpose() * p.objective[k] * v;
    out.problem.objective.push_back(0.5 * (c + c.transpose()));
  }
  for (const auto& con : p.constraints) {
    Constraint r;
    r.rhs = con.rhs;
    for (const auto& t : con.terms) {
      const Index kb = out.block_of[static_cast<size_t>(t.block)];
      if (kb < 0) continue;
      const RealMatrix& v = bases[static_cast<size_t>(t.block)];
      RealMatrix a = v.transpose() * t.matrix * v;
      r.terms.push_back({kb, 0.5 * (a + a.transpose())});
    }
    out.problem.constraints.push_back(std::move(r));
  }
  for (const auto& g : p.certificate_groups) {
    CertificateGroup rg;
    rg.rows = g.rows;
    for (Index k : g.blocks)
      if (out.block_of[static_cast<size_t>(k)] >= 0) rg.blocks.push_back(out.block_of[static_cast<size_t>(k)]);
    if (!rg.blocks.empty()) out.problem.certificate_groups.push_back(std::move(rg));
  }
  out.bases = std::move(bases);
  return out;
}

BlockMatrix FaceRestriction::expand(const BlockMatrix& y) const {
  BlockMatrix out(bases.size());
  for (size_t k = 0; k < bases.size(); ++k) {
    const Index kb = block_of[k];
    if (kb < 0) {
      out[k] = RealMatrix::Zero(bases[k].rows(), bases[k].rows());
    } else {
      out[k] = bases[k] * y[static_cast<size_t>(kb)] * bases[k].transpose();
    }
  }
  return out;
}

void write_sdpa(std::ostream& os, const SdpProblem& p) {
  os << "* mdirand SDP: max <C,X> s.t. <A_i,X> = b_i, X psd (written as SDPA dual)\n";
  os << p.num_constraints() << "\n" << p.num_blocks() << "\n";
  for (Index k = 0; k < p.num_blocks(); ++k) os << (k ? " " : "") << p.block_sizes[static_cast<size_t>(k)];
  os << "\n";
  os << std::setprecision(17);
  for (Index i = 0; i < p.num_constraints(); ++i) os << (i ? " " : "") << p.constraints[static_cast<size_t>(i)].rhs;
  os << "\n";
  auto emit = [&](Index mat, Index block, const RealMatrix& a) {
    for (Index r = 0; r < a.rows(); ++r)
      for (Index c = r; c < a.cols(); ++c)
        if (a(r, c) != 0.0) os << mat << " " << block + 1 << " " << r + 1 << " " << c + 1 << " " << a(r, c) << "\n";
  };
  for (Index k = 0; k < p.num_blocks(); ++k) emit(0, k, p.objective[static_cast<size_t>(k)]);
  for (Index i = 0; i < p.num_constraints(); ++i)
    for (const auto& t : p.constraints[static_cast<size_t>(i)].terms) emit(i + 1, t.block, t.matrix);
}

}  // namespace mdirand
