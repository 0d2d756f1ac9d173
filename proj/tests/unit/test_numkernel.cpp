#include <gtest/gtest.h>

#include "generators.hpp"
#include "gstruct/error.hpp"
#include "gstruct/numkernel.hpp"

using namespace gstruct;
using namespace gstruct::testing;

TEST(Tolerance, RejectsNegativeOrBothZero) {
  EXPECT_NO_THROW((Tolerance{1e-9, 0.0}.validate()));
  EXPECT_THROW((Tolerance{-1.0, 1e-9}.validate()), Error);
  EXPECT_THROW((Tolerance{0.0, 0.0}.validate()), Error);
  EXPECT_DOUBLE_EQ((Tolerance{1e-3, 1e-2}.bound(10.0)), 1e-3 + 1e-1);
}

TEST(SpdSqrt, IdentityAndDiagonal) {
  EXPECT_EQ(spd_sqrt(identity(4)), identity(4));
  const Matrix r = spd_sqrt(diag({4, 9}));
  EXPECT_NEAR((r - diag({2, 3})).norm(), 0.0, 1e-15);
}

TEST(SpdSqrt, MatchesConjugatedDiagonalRoot) {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Index n = 2 + t % 7;
    const Matrix q = random_orthogonal(n, rng);
    Vector d(n);
    for (Index i = 0; i < n; ++i) d(i) = uniform(rng, 0.1, 10.0);
    const Matrix m = q * d.asDiagonal() * q.transpose();
    const Matrix oracle = q * d.cwiseSqrt().asDiagonal() * q.transpose();
    EXPECT_LT((spd_sqrt(m) - oracle).norm(), 1e-12 * oracle.norm());
  }
}

TEST(SpdSqrt, Errors) {
  try {
    spd_sqrt(mat(2, 2, {1, 2, 0, 1}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotSymmetric);
  }
  try {
    spd_sqrt(diag({1, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
  try {
    spd_sqrt(diag({1, -2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPositiveDefinite);
  }
}

TEST(SpdSqrt, SquaresBackWithinBound) {
  Rng rng(12);
  const Tolerance tol;
  for (int t = 0; t < 500; ++t) {
    const Index n = 1 + t % 20;
    const Matrix m = random_spd(n, rng, 0.01, 50.0);
    const Matrix r = spd_sqrt(m, tol);
    EXPECT_LE((r * r - m).norm(), tol.bound(m.norm())) << "trial " << t;
    EXPECT_EQ(r, r.transpose());
    EXPECT_GT(symmetric_eigen(r).values.minCoeff(), 0.0);
  }
}

TEST(MetricAdjoint, EuclideanAndFixedPoint) {
  Rng rng(13);
  const Matrix a = random_matrix(4, 4, rng);
  EXPECT_LT((metric_adjoint(a, identity(4)) - a.transpose()).norm(), 1e-14);
  const Matrix g = random_spd(4, rng);
  const Matrix s = random_spd(4, rng);
  const Matrix self = g.inverse() * s;  // g(self u, v) = u^T s v is symmetric
  EXPECT_LT((metric_adjoint(self, g) - self).norm(), 1e-12 * self.norm());
  EXPECT_THROW(metric_adjoint(identity(3), identity(4)), Error);
}

TEST(MetricAdjoint, DefiningIdentityOnRandomPairs) {
  Rng rng(14);
  const Matrix a = random_matrix(5, 5, rng);
  const Matrix g = random_spd(5, rng);
  const Matrix as = metric_adjoint(a, g);
  for (int k = 0; k < 20; ++k) {
    const Vector u = random_vector(5, rng), v = random_vector(5, rng);
    const double lhs = (as * u).dot(g * v);
    const double rhs = u.dot(g * (a * v));
    EXPECT_NEAR(lhs, rhs, 1e-12 * (1.0 + std::abs(rhs)));
  }
}

TEST(MetricAdjoint, Involution) {
  Rng rng(15);
  for (int t = 0; t < 100; ++t) {
    const Index n = 1 + t % 8;
    const Matrix a = random_matrix(n, n, rng);
    const Matrix g = random_spd(n, rng);
    EXPECT_LE((metric_adjoint(metric_adjoint(a, g), g) - a).norm(), 1e-12 * a.norm() * 10);
  }
}

TEST(KernelImage, TrivialCases) {
  const KernelImage z = kernel_and_image(Matrix::Zero(3, 3));
  EXPECT_EQ(z.rank, 0);
  EXPECT_EQ(z.kernel.cols(), 3);
  const KernelImage i = kernel_and_image(identity(3));
  EXPECT_EQ(i.rank, 3);
  EXPECT_EQ(i.kernel.cols(), 0);
}

TEST(KernelImage, NilpotentTwoByTwo) {
  const KernelImage k = kernel_and_image(mat(2, 2, {0, 1, 0, 0}));
  EXPECT_EQ(k.rank, 1);
  Matrix e1(2, 1);
  e1 << 1, 0;
  EXPECT_LT((k.kernel - e1).norm(), 1e-15);
  EXPECT_LT((k.image - e1).norm(), 1e-15);
}

TEST(KernelImage, ReconstructionProperties) {
  Rng rng(16);
  const Tolerance tol;
  for (int t = 0; t < 100; ++t) {
    const Index rows = 2 + t % 6, cols = 2 + (t / 6) % 6;
    const Index r = 1 + t % std::min(rows, cols);
    const Matrix a = random_matrix(rows, r, rng) * random_matrix(r, cols, rng);
    const KernelImage ki = kernel_and_image(a, tol);
    EXPECT_EQ(ki.rank, r);
    EXPECT_EQ(ki.rank + ki.kernel.cols(), cols);
    EXPECT_LE((a * ki.kernel).norm(), 1e-12 * a.norm() * 10);
    const Vector y = a * random_vector(cols, rng);
    const Vector off = y - ki.image * (ki.image.transpose() * y);
    EXPECT_LE(off.norm(), tol.bound(y.norm()));
  }
}

TEST(Rank, ThresholdIsAtolPlusRtolSigmaMax) {
  const Tolerance tol{1e-6, 1e-3};
  // sigma_max = 10, cut = 1e-6 + 1e-2
  EXPECT_EQ(numerical_rank(diag({10, 0.011}), tol), 2);
  EXPECT_EQ(numerical_rank(diag({10, 0.0099}), tol), 1);
}

TEST(Signature, CountsWithAtolThreshold) {
  EXPECT_EQ(signature(diag({1, -2, 0, 3})), (Signature{2, 1, 1}));
  EXPECT_TRUE(signature(diag({1, -1})).neutral());
  EXPECT_FALSE(signature(diag({1, 1, -1})).neutral());
}

TEST(CheckedInverse, SingularThrows) {
  try {
    checked_inverse(mat(2, 2, {1, 2, 2, 4}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Singular);
  }
  EXPECT_LT((checked_inverse(diag({2, 4})) - diag({0.5, 0.25})).norm(), 1e-16);
}

TEST(CanonicalBasis, DependsOnlyOnTheSubspace) {
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    const Matrix b = random_matrix(6, 3, rng);
    const Matrix mixed = b * random_invertible(3, rng);
    const Matrix c1 = canonical_basis(b), c2 = canonical_basis(mixed);
    EXPECT_LT((c1 - c2).norm(), 1e-9);
    EXPECT_LT((c1.transpose() * c1 - identity(3)).norm(), 1e-12);
    EXPECT_LT(subspace_gap(c1, b.householderQr().householderQ() * Matrix::Identity(6, 3)), 1e-12);
  }
}

TEST(SymmetricEigen, DescendingAndReconstructs) {
  Rng rng(18);
  const Matrix m = random_spd(6, rng) - 2.0 * identity(6);
  const SymmetricEigen e = symmetric_eigen(m);
  for (Index i = 1; i < 6; ++i) EXPECT_GE(e.values(i - 1), e.values(i));
  EXPECT_LT((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - m).norm(), 1e-12);
}
