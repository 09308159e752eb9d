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

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdirand/tolerances.h"

namespace mdirand {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Raised when an iterative routine fails to converge or a factorization
// that must succeed does not.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename DerivedA, typename DerivedB>
using KronScalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                        typename DerivedB::Scalar>::ReturnType;

// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<KronScalar<DerivedA, DerivedB>, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = KronScalar<DerivedA, DerivedB>;
  const Index br = b.rows();
  const Index bc = b.cols();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * br, a.cols() * bc);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * br, j * bc, br, bc) =
          Scalar(a(i, j)) * b.template cast<Scalar>();
    }
  }
  return out;
}

// Square complex matrix equal to its conjugate transpose. The stored matrix is
// the exact Hermitian part of the validated input.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  // Throws std::invalid_argument if m is not square, has non-finite entries,
  // or differs from its adjoint by more than tol in any entry.
  explicit HermitianOperator(const ComplexMatrix& m,
                             double tol = default_tolerances().hermitian);

  static HermitianOperator identity(Index dim);
  static HermitianOperator zero(Index dim);

  Index dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }

  HermitianOperator& operator+=(const HermitianOperator& o);
  HermitianOperator& operator-=(const HermitianOperator& o);
  HermitianOperator& operator*=(double s);

  friend HermitianOperator operator+(HermitianOperator a, const HermitianOperator& b) { return a += b; }
  friend HermitianOperator operator-(HermitianOperator a, const HermitianOperator& b) { return a -= b; }
  friend HermitianOperator operator*(double s, HermitianOperator a) { return a *= s; }

 private:
  ComplexMatrix m_;
};

HermitianOperator kron(const HermitianOperator& a, const HermitianOperator& b);

// Re tr(a b).
double trace_product(const HermitianOperator& a, const HermitianOperator& b);

// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix, row-by-row
// sweep order. Stops once the off-diagonal Frobenius norm falls below
// rel_tol * max(1, |a|_F). Returns eigenvalues in ascending order.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> jacobi_eigenvalues(
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a, Scalar rel_tol, int max_sweeps) {
  using std::abs;
  using std::sqrt;
  const Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("jacobi_eigenvalues: matrix not square");
  a = (a + a.transpose()).eval() / Scalar(2);
  const Scalar target = rel_tol * std::max(Scalar(1), a.norm());
  auto off_norm = [&] {
    Scalar s(0);
    for (Index j = 0; j < n; ++j)
      for (Index i = j + 1; i < n; ++i) s += a(i, j) * a(i, j);
    return sqrt(Scalar(2) * s);
  };
  int sweep = 0;
  while (off_norm() >= target) {
    if (++sweep > max_sweeps) {
      throw NumericalError("jacobi_eigenvalues: no convergence after " +
                           std::to_string(max_sweeps) + " sweeps");
    }
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar tau = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        const Scalar t = (tau >= Scalar(0) ? Scalar(1) : Scalar(-1)) /
                         (abs(tau) + sqrt(Scalar(1) + tau * tau));
        const Scalar c = Scalar(1) / sqrt(Scalar(1) + t * t);
        const Scalar s = t * c;
        for (Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
      }
    }
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> ev = a.diagonal();
  std::sort(ev.data(), ev.data() + n);
  return ev;
}

// Ascending eigenvalues of a real symmetric matrix (cyclic Jacobi).
RealVector symmetric_eigenvalues(const RealMatrix& m);
double min_symmetric_eigenvalue(const RealMatrix& m);

// Ascending eigenvalues of a Hermitian operator, each listed once.
RealVector eigenvalues(const HermitianOperator& h);
double min_eigenvalue(const HermitianOperator& h);

// [[A, -B], [B, A]] for h = A + iB. PSD-ness is preserved and
// tr(embed(x) embed(y)) = 2 Re tr(x y).
template <typename Derived>
RealMatrix real_embed(const Eigen::MatrixBase<Derived>& h) {
  const Index r = h.rows(), c = h.cols();
  RealMatrix out(2 * r, 2 * c);
  out.topLeftCorner(r, c) = h.real();
  out.bottomRightCorner(r, c) = h.real();
  out.topRightCorner(r, c) = -h.imag();
  out.bottomLeftCorner(r, c) = h.imag();
  return out;
}
RealMatrix real_embed(const HermitianOperator& h);

// Complex matrix represented by a symmetric 2d x 2d real matrix. For inputs
// that are not exactly of embedded form this is the projection onto it.
ComplexMatrix complex_from_embedding(const RealMatrix& x);

// Lower-triangular L with L L^T = m, or nullopt when a pivot is not positive.
std::optional<RealMatrix> cholesky_spd(const RealMatrix& m);

// Maximal linearly independent subset of a list of rows, chosen greedily in
// input order. coefficients.col(j) expresses rows[dropped[j]] as a combination
// of rows[kept]; residuals[j] is the norm of that reconstruction error.
struct RowSpaceBasis {
  std::vector<Index> kept;
  std::vector<Index> dropped;
  RealMatrix coefficients;
  RealVector residuals;
};

// Rows are the rows of `rows`; a row is dropped when its distance to the span
// of the previously kept rows is at most tol. Reorthogonalized Gram-Schmidt.
RowSpaceBasis row_space_basis(const RealMatrix& rows, double tol);

// Same greedy selection computed from the Gram matrix G = R R^T with a
// blocked, in-order semidefinite Cholesky. A row is dropped when its squared
// distance to the kept span (the Cholesky pivot) is at most pivot_tol.
// residuals hold sqrt(max(pivot, 0)); callers needing exact residuals must
// recompute them from the rows.
RowSpaceBasis row_space_basis_from_gram(const RealMatrix& gram, double pivot_tol);

}  // namespace mdirand
