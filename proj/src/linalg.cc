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

#include "mdirand/linalg.h"

#include <string>

namespace mdirand {

HermitianOperator::HermitianOperator(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("HermitianOperator: matrix is " + std::to_string(m.rows()) +
                                "x" + std::to_string(m.cols()) + ", not square");
  }
  if (!m.allFinite()) throw std::invalid_argument("HermitianOperator: non-finite entry");
  const double dev = m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev >= tol) {
    throw std::invalid_argument("HermitianOperator: deviation from adjoint " +
                                std::to_string(dev) + " exceeds tolerance");
  }
  m_ = (m + m.adjoint()) / 2.0;
}

HermitianOperator HermitianOperator::identity(Index dim) {
  return HermitianOperator(ComplexMatrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::zero(Index dim) {
  return HermitianOperator(ComplexMatrix::Zero(dim, dim));
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  if (o.dim() != dim()) throw std::invalid_argument("HermitianOperator: dimension mismatch");
  m_ += o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator-=(const HermitianOperator& o) {
  if (o.dim() != dim()) throw std::invalid_argument("HermitianOperator: dimension mismatch");
  m_ -= o.m_;
  return *this;
}

HermitianOperator& HermitianOperator::operator*=(double s) {
  m_ *= s;
  return *this;
}

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b) {
  return HermitianOperator(kron(a.matrix(), b.matrix()));
}

double trace_product(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_product: dimension mismatch");
  // tr(a b) = sum_ij a_ij b_ji = sum_ij a_ij conj(b_ij) for Hermitian b
  return (a.matrix().array() * b.matrix().array().conjugate()).sum().real();
}

RealVector symmetric_eigenvalues(const RealMatrix& m) {
  const auto& tol = default_tolerances();
  return jacobi_eigenvalues<double>(m, tol.jacobi_offdiag, tol.jacobi_max_sweeps);
}

double min_symmetric_eigenvalue(const RealMatrix& m) {
  if (m.size() == 0) throw std::invalid_argument("min_symmetric_eigenvalue: empty matrix");
  return symmetric_eigenvalues(m)(0);
}

RealVector eigenvalues(const HermitianOperator& h) {
  // Each eigenvalue of h appears twice in the embedding.
  const RealVector doubled = symmetric_eigenvalues(real_embed(h));
  RealVector out(h.dim());
  for (Index i = 0; i < h.dim(); ++i) out(i) = 0.5 * (doubled(2 * i) + doubled(2 * i + 1));
  return out;
}

double min_eigenvalue(const HermitianOperator& h) {
  if (h.dim() == 0) throw std::invalid_argument("min_eigenvalue: empty operator");
  return min_symmetric_eigenvalue(real_embed(h));
}

RealMatrix real_embed(const HermitianOperator& h) { return real_embed(h.matrix()); }

ComplexMatrix complex_from_embedding(const RealMatrix& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0) {
    throw std::invalid_argument("complex_from_embedding: expected an even square matrix");
  }
  const Index d = x.rows() / 2;
  ComplexMatrix out(d, d);
  out.real() = 0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
  out.imag() = 0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
  return out;
}

std::optional<RealMatrix> cholesky_spd(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("cholesky_spd: matrix not square");
  Eigen::LLT<RealMatrix> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  return RealMatrix(llt.matrixL());
}

RowSpaceBasis row_space_basis(const RealMatrix& rows, double tol) {
  const Index m = rows.rows();
  const Index n = rows.cols();
  RowSpaceBasis out;
  RealMatrix q(n, std::min(m, n));
  Index rank = 0;
  for (Index i = 0; i < m; ++i) {
    RealVector v = rows.row(i).transpose();
    if (rank > 0) {
      // two passes of classical Gram-Schmidt
      for (int pass = 0; pass < 2; ++pass) {
        const RealVector h = q.leftCols(rank).transpose() * v;
        v.noalias() -= q.leftCols(rank) * h;
      }
    }
    const double norm = v.norm();
    if (norm > tol && rank < n) {
      q.col(rank++) = v / norm;
      out.kept.push_back(i);
    } else {
      out.dropped.push_back(i);
    }
  }

  const Index r = static_cast<Index>(out.kept.size());
  out.coefficients.setZero(r, static_cast<Index>(out.dropped.size()));
  out.residuals.setZero(static_cast<Index>(out.dropped.size()));
  if (out.dropped.empty()) return out;

  RealMatrix basis(n, r);
  for (Index k = 0; k < r; ++k) basis.col(k) = rows.row(out.kept[k]).transpose();
  Eigen::ColPivHouseholderQR<RealMatrix> qr(basis);
  for (Index j = 0; j < static_cast<Index>(out.dropped.size()); ++j) {
    const RealVector target = rows.row(out.dropped[j]).transpose();
    if (r > 0) out.coefficients.col(j) = qr.solve(target);
    out.residuals(j) = (basis * out.coefficients.col(j) - target).norm();
  }
  return out;
}

RowSpaceBasis row_space_basis_from_gram(const RealMatrix& gram, double pivot_tol) {
  const Index m = gram.rows();
  if (gram.cols() != m) throw std::invalid_argument("row_space_basis_from_gram: not square");
  RealMatrix l = gram;
  std::vector<char> keep(static_cast<size_t>(m), 0);
  RealVector pivots = RealVector::Zero(m);
  constexpr Index kPanel = 64;

  for (Index k0 = 0; k0 < m; k0 += kPanel) {
    const Index kb = std::min(kPanel, m - k0);
    for (Index j = k0; j < k0 + kb; ++j) {
      const Index w = j - k0;
      if (w > 0) {
        l.col(j).tail(m - j).noalias() -=
            l.block(j, k0, m - j, w) * l.row(j).segment(k0, w).transpose();
      }
      const double d = l(j, j);
      pivots(j) = d;
      if (!(d > pivot_tol)) {
        l.col(j).tail(m - j).setZero();
        continue;
      }
      keep[static_cast<size_t>(j)] = 1;
      const double root = std::sqrt(d);
      l(j, j) = root;
      l.col(j).tail(m - j - 1) /= root;
    }
    const Index rest = m - k0 - kb;
    if (rest > 0) {
      l.bottomRightCorner(rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(
          l.block(k0 + kb, k0, rest, kb), -1.0);
    }
  }

  RowSpaceBasis out;
  std::vector<Index> position(static_cast<size_t>(m), -1);
  for (Index i = 0; i < m; ++i) {
    if (keep[static_cast<size_t>(i)]) {
      position[static_cast<size_t>(i)] = static_cast<Index>(out.kept.size());
      out.kept.push_back(i);
    } else {
      out.dropped.push_back(i);
    }
  }
  const Index r = static_cast<Index>(out.kept.size());
  RealMatrix lkk(r, r);
  for (Index a = 0; a < r; ++a)
    for (Index b = 0; b < r; ++b) lkk(a, b) = l(out.kept[a], out.kept[b]);

  out.coefficients.setZero(r, static_cast<Index>(out.dropped.size()));
  out.residuals.setZero(static_cast<Index>(out.dropped.size()));
  for (Index j = 0; j < static_cast<Index>(out.dropped.size()); ++j) {
    const Index d = out.dropped[j];
    // kept rows preceding d
    Index prior = 0;
    while (prior < r && out.kept[prior] < d) ++prior;
    if (prior > 0) {
      RealVector rhs(prior);
      for (Index a = 0; a < prior; ++a) rhs(a) = l(d, out.kept[a]);
      out.coefficients.col(j).head(prior) =
          lkk.topLeftCorner(prior, prior).triangularView<Eigen::Lower>().transpose().solve(rhs);
    }
    out.residuals(j) = std::sqrt(std::max(pivots(d), 0.0));
  }
  return out;
}

}  // namespace mdirand
