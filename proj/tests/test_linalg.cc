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

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mdirand/linalg.h"
#include "mdirand/quantum.h"
#include "test_util.h"

namespace mdirand {
namespace {

using testing::random_hermitian;
using testing::random_spd;

TEST(Hermitian, RejectsNonHermitianInput) {
  ComplexMatrix m(2, 2);
  m << 1.0, 2.0, 0.0, 1.0;
  EXPECT_THROW(HermitianOperator{m}, std::invalid_argument);
  ComplexMatrix r(2, 3);
  r.setZero();
  EXPECT_THROW(HermitianOperator{r}, std::invalid_argument);
  ComplexMatrix n = ComplexMatrix::Identity(2, 2);
  n(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(HermitianOperator{n}, std::invalid_argument);
}

TEST(Hermitian, StoredMatrixIsExactlyHermitian) {
  std::mt19937 rng(1);
  for (int t = 0; t < 20; ++t) {
    ComplexMatrix m = random_hermitian(rng, 3);
    m(0, 1) += Complex(1e-14, -1e-14);
    const HermitianOperator h(m);
    EXPECT_LT((h.matrix() - h.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Kron, Identities) {
  EXPECT_TRUE(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)).isApprox(ComplexMatrix::Identity(4, 4)));
  RealMatrix p = RealMatrix::Zero(2, 2);
  p(0, 0) = 1.0;
  RealMatrix expected = RealMatrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  EXPECT_EQ(kron(p, p), expected);
}

TEST(Kron, SigmaZSquaredOnBasisStates) {
  const HermitianOperator zz = kron(HermitianOperator(pauli_z()), HermitianOperator(pauli_z()));
  // <ab| Z(x)Z |ab> = (-1)^(a+b)
  const double expected[4] = {1, -1, -1, 1};
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(zz.matrix()(k, k).real(), expected[k]);
  EXPECT_LT((zz.matrix() - zz.matrix().diagonal().asDiagonal().toDenseMatrix()).norm(), 1e-15);
}

TEST(Kron, AssociativeAndMixedProduct) {
  std::mt19937 rng(2);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = testing::random_complex(rng, 2, 2), b = testing::random_complex(rng, 2, 2);
    const ComplexMatrix c = testing::random_complex(rng, 2, 2), d = testing::random_complex(rng, 2, 2);
    EXPECT_LT((kron(kron(a, b), c) - kron(a, kron(b, c))).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((kron(a, b) * kron(c, d) - kron(ComplexMatrix(a * c), ComplexMatrix(b * d))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Eigen, MinEigenvalueExamples) {
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 3.0, 1.0, 2.0;
  EXPECT_NEAR(min_eigenvalue(HermitianOperator(d)), 1.0, 1e-10);
  ComplexMatrix plus = ComplexMatrix::Constant(2, 2, 0.5);
  EXPECT_NEAR(min_eigenvalue(HermitianOperator(plus)), 0.0, 1e-10);
  const ComplexMatrix rho = 0.5 * ComplexMatrix::Identity(2, 2) + 0.3 * pauli_x();
  EXPECT_NEAR(min_eigenvalue(HermitianOperator(rho)), 0.2, 1e-10);
}

// Oracle: Eigen's self-adjoint solver on the complex matrix.
TEST(Eigen, JacobiMatchesReferenceSolver) {
  std::mt19937 rng(3);
  for (int t = 0; t < 30; ++t) {
    const Index d = 1 + t % 8;
    const HermitianOperator h(random_hermitian(rng, d));
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> ref(h.matrix(), Eigen::EigenvaluesOnly);
    const RealVector ours = eigenvalues(h);
    ASSERT_EQ(ours.size(), d);
    for (Index i = 0; i < d; ++i) EXPECT_NEAR(ours(i), ref.eigenvalues()(i), 1e-10);
  }
}

TEST(Eigen, LargestSupportedDimension) {
  std::mt19937 rng(4);
  const RealMatrix a = testing::random_symmetric(rng, 64);
  Eigen::SelfAdjointEigenSolver<RealMatrix> ref(a, Eigen::EigenvaluesOnly);
  EXPECT_NEAR(min_symmetric_eigenvalue(a), ref.eigenvalues()(0), 1e-10);
}

TEST(Embed, RealInputIsBlockDiagonal) {
  RealMatrix a(2, 2);
  a << 1, 2, 2, 3;
  const RealMatrix e = real_embed(ComplexMatrix(a.cast<Complex>()));
  EXPECT_EQ(e.topLeftCorner(2, 2), a);
  EXPECT_EQ(e.bottomRightCorner(2, 2), a);
  EXPECT_TRUE(e.topRightCorner(2, 2).isZero());
  EXPECT_TRUE(e.bottomLeftCorner(2, 2).isZero());
}

TEST(Embed, SigmaYSpectrum) {
  const RealVector ev = symmetric_eigenvalues(real_embed(HermitianOperator(pauli_y())));
  ASSERT_EQ(ev.size(), 4);
  EXPECT_NEAR(ev(0), -1, 1e-12);
  EXPECT_NEAR(ev(1), -1, 1e-12);
  EXPECT_NEAR(ev(2), 1, 1e-12);
  EXPECT_NEAR(ev(3), 1, 1e-12);
}

TEST(Embed, TraceIdentityAndSpectrumDoubling) {
  std::mt19937 rng(5);
  for (int t = 0; t < 50; ++t) {
    const Index d = 1 + t % 5;
    const HermitianOperator x(random_hermitian(rng, d)), y(random_hermitian(rng, d));
    const double lhs = (real_embed(x) * real_embed(y)).trace();
    EXPECT_NEAR(lhs, 2.0 * (x.matrix() * y.matrix()).trace().real(), 1e-12 * (1.0 + std::abs(lhs)));
    EXPECT_NEAR(min_eigenvalue(x), min_symmetric_eigenvalue(real_embed(x)), 1e-10);
    EXPECT_LT((complex_from_embedding(real_embed(x)) - x.matrix()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Embed, PsdPreserved) {
  std::mt19937 rng(6);
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = testing::random_complex(rng, 3, 2);
    const HermitianOperator psd(a * a.adjoint());
    EXPECT_GT(min_symmetric_eigenvalue(real_embed(psd)), -1e-10);
  }
}

TEST(Cholesky, Examples) {
  EXPECT_EQ(*cholesky_spd(RealMatrix::Identity(3, 3)), RealMatrix::Identity(3, 3));
  RealMatrix m(2, 2);
  m << 4, 2, 2, 5;
  RealMatrix l(2, 2);
  l << 2, 0, 1, 2;
  EXPECT_LT((*cholesky_spd(m) - l).norm(), 1e-14);
  RealMatrix h(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) h(i, j) = 1.0 / (i + j + 1);
  const RealMatrix lh = *cholesky_spd(h);
  EXPECT_LT((lh * lh.transpose() - h).norm(), 1e-10 * (1.0 + h.norm()));
}

TEST(Cholesky, ReportsIndefinite) {
  RealMatrix m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_FALSE(cholesky_spd(m).has_value());
  std::mt19937 rng(7);
  const RealMatrix s = random_spd(rng, 6);
  const RealMatrix l = *cholesky_spd(s);
  EXPECT_LT((l * l.transpose() - s).norm(), 1e-10 * (1.0 + s.norm()));
}

TEST(RowSpace, KeepsFirstTwo) {
  RealMatrix rows(3, 2);
  rows << 1, 0, 0, 1, 1, 1;
  const RowSpaceBasis b = row_space_basis(rows, 1e-9);
  EXPECT_EQ(b.kept, (std::vector<Index>{0, 1}));
  ASSERT_EQ(b.dropped, (std::vector<Index>{2}));
  EXPECT_NEAR(b.coefficients(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(b.coefficients(1, 0), 1.0, 1e-12);
}

TEST(RowSpace, ZeroRowAlwaysDropped) {
  RealMatrix rows(3, 3);
  rows << 0, 0, 0, 1, 2, 3, 0, 0, 0;
  const RowSpaceBasis b = row_space_basis(rows, 1e-9);
  EXPECT_EQ(b.kept, (std::vector<Index>{1}));
  EXPECT_EQ(b.dropped, (std::vector<Index>{0, 2}));
}

// Oracle: SVD rank of the full and the kept rows.
TEST(RowSpace, RandomInstancesAgreeWithSvdRank) {
  std::mt19937 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 25; ++t) {
    const Index rank = 1 + t % 5, n = 8, m = rank + 4;
    RealMatrix basis(rank, n), mix(m, rank);
    for (Index i = 0; i < basis.size(); ++i) basis.data()[i] = g(rng);
    for (Index i = 0; i < mix.size(); ++i) mix.data()[i] = g(rng);
    const RealMatrix rows = mix * basis;
    for (const bool via_gram : {false, true}) {
      const RowSpaceBasis b = via_gram ? row_space_basis_from_gram(rows * rows.transpose(), 1e-10 * rows.rowwise().squaredNorm().maxCoeff())
                                       : row_space_basis(rows, 1e-9);
      Eigen::JacobiSVD<RealMatrix> svd(rows);
      svd.setThreshold(1e-9);
      EXPECT_EQ(static_cast<Index>(b.kept.size()), svd.rank()) << "gram " << via_gram;
      RealMatrix kept(static_cast<Index>(b.kept.size()), n);
      for (size_t i = 0; i < b.kept.size(); ++i) kept.row(static_cast<Index>(i)) = rows.row(b.kept[i]);
      Eigen::JacobiSVD<RealMatrix> ksvd(kept);
      ksvd.setThreshold(1e-9);
      EXPECT_EQ(ksvd.rank(), static_cast<Index>(b.kept.size()));
      for (size_t j = 0; j < b.dropped.size(); ++j) {
        const RealVector rec = kept.transpose() * b.coefficients.col(static_cast<Index>(j));
        EXPECT_LT((rec - rows.row(b.dropped[j]).transpose()).norm(), 1e-8 * (1.0 + rows.norm()));
      }
    }
  }
}

}  // namespace
}  // namespace mdirand
