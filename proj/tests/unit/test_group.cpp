#include <cmath>

#include <gtest/gtest.h>

#include "geoprec/group.hpp"
#include "geoprec/rng.hpp"
#include "test_support.hpp"

namespace geoprec {
namespace {

using testing::error_code;
using testing::random_element;
using testing::random_matrix;

// Entries outside the diagonal blocks of p.
double off_block_norm(const BlockPartition& p, const DenseMatrix& x) {
  DenseMatrix masked = x;
  for (std::size_t b = 0; b < p.num_blocks(); ++b)
    masked.block(p.offset(b), p.offset(b), p.size(b), p.size(b)).setZero();
  return masked.norm();
}

std::vector<GroupScheme> sample_schemes(Index m, Index n) {
  std::vector<GroupScheme> out;
  for (Side side : {Side::kLeft, Side::kLeftRight}) {
    out.push_back(GroupScheme::diagonal(side, m, n));
    out.push_back(GroupScheme::block(side, m, n, 2));
    out.push_back(GroupScheme::full(side, m, n));
  }
  return out;
}

TEST(BlockPartition, UniformAbsorbsRemainder) {
  const auto p = BlockPartition::uniform(7, 3);
  ASSERT_EQ(p.num_blocks(), 2u);
  EXPECT_EQ(p.size(0), 3);
  EXPECT_EQ(p.size(1), 4);
  EXPECT_EQ(p.offset(1), 3);
  EXPECT_EQ(p.dimension(), 7);
  EXPECT_EQ(p.block_of(6), 1u);
  EXPECT_TRUE(BlockPartition::diagonal(4).is_diagonal());
  EXPECT_EQ(BlockPartition::full(4).num_blocks(), 1u);
}

TEST(ProjectToLie, HermitianBlockDiagonalIsFixed) {
  Rng rng(1);
  const auto scheme = GroupScheme::block(Side::kLeftRight, 5, 4, 2);
  const LieDirection h = random_direction(scheme, rng);
  const LieDirection p = project_to_lie(scheme, h.h1, h.h2);
  EXPECT_LE((p.h1 - h.h1).norm(), 1e-15);
  EXPECT_LE((p.h2 - h.h2).norm(), 1e-15);
}

TEST(ProjectToLie, DiagonalTorusExtractsRealDiagonal) {
  const auto scheme = GroupScheme::diagonal(Side::kLeft, 2, 2);
  DenseMatrix m(2, 2);
  m << 1, 5, 7, 2;
  const LieDirection p = project_to_lie(scheme, m, DenseMatrix::Zero(2, 2));
  DenseMatrix expected = DenseMatrix::Zero(2, 2);
  expected(0, 0) = 1;
  expected(1, 1) = 2;
  EXPECT_EQ(p.h1, expected);
  EXPECT_TRUE(p.h2.isZero(0.0));

  DenseMatrix c(2, 2);
  c << Complex(1, 3), 0, 0, Complex(-2, 1);
  EXPECT_EQ(project_to_lie(scheme, c, DenseMatrix::Zero(2, 2)).h1.imag().norm(), 0.0);
}

TEST(ProjectToLie, OrthogonalIdempotentSelfAdjoint) {
  Rng rng(2);
  for (const auto& scheme : sample_schemes(5, 4)) {
    const DenseMatrix m1 = rng.complex_gaussian(5, 5);
    const DenseMatrix m2 = rng.complex_gaussian(4, 4);
    const LieDirection p = project_to_lie(scheme, m1, m2);
    const LieDirection residual{m1 - p.h1, scheme.two_sided() ? DenseMatrix(m2 - p.h2) : DenseMatrix::Zero(4, 4)};
    for (int k = 0; k < 20; ++k) {
      const LieDirection h = random_direction(scheme, rng);
      EXPECT_NEAR(inner(residual, h), 0.0, 1e-12);
    }
    const LieDirection pp = project_to_lie(scheme, p.h1, p.h2);
    EXPECT_LE((pp.h1 - p.h1).norm() + (pp.h2 - p.h2).norm(), 1e-15);

    const DenseMatrix k1 = rng.complex_gaussian(5, 5);
    const DenseMatrix k2 = rng.complex_gaussian(4, 4);
    const LieDirection q = project_to_lie(scheme, k1, k2);
    const LieDirection km{k1, scheme.two_sided() ? k2 : DenseMatrix::Zero(4, 4)};
    const LieDirection mm{m1, scheme.two_sided() ? m2 : DenseMatrix::Zero(4, 4)};
    EXPECT_NEAR(inner(p, km), inner(mm, q), 1e-12);
  }
}

TEST(ProjectToLie, DimensionMismatch) {
  const auto scheme = GroupScheme::diagonal(Side::kLeft, 3, 3);
  EXPECT_EQ(error_code([&] { project_to_lie(scheme, DenseMatrix::Zero(2, 2), DenseMatrix::Zero(3, 3)); }),
            ErrorCode::kDimensionMismatch);
}

TEST(ExpAction, ZeroStepIsIdentityMap) {
  Rng rng(3);
  const auto scheme = GroupScheme::block(Side::kLeftRight, 4, 5, 2);
  const GroupElement g = random_element(scheme, rng);
  const GroupElement h = exp_action(g, random_direction(scheme, rng), 0.0);
  EXPECT_LE((h.x - g.x).norm(), 1e-12);
  EXPECT_LE((h.y - g.y).norm(), 1e-12);
}

TEST(ExpAction, ScalarExponential) {
  const auto scheme = GroupScheme::diagonal(Side::kLeft, 2, 2);
  LieDirection h = LieDirection::zero(scheme);
  h.h1(0, 0) = std::log(2.0);
  const GroupElement g = exp_action(GroupElement::identity(scheme), h, 1.0);
  EXPECT_NEAR(g.x(0, 0).real(), 2.0, 1e-15);
  EXPECT_NEAR(g.x(1, 1).real(), 1.0, 1e-15);
  EXPECT_EQ(g.x(0, 1), Complex(0.0));
}

TEST(ExpAction, OneParameterSubgroup) {
  Rng rng(4);
  // Repolarization moves the representative within its coset, so the law is
  // exact along geodesics through the identity.
  for (const auto& scheme : sample_schemes(4, 3)) {
    const GroupElement g = GroupElement::identity(scheme);
    const LieDirection h = random_direction(scheme, rng);
    const GroupElement two = exp_action(exp_action(g, h, 0.3), h, -0.7);
    const GroupElement one = exp_action(g, h, -0.4);
    EXPECT_LE((two.x - one.x).norm(), 1e-10 * one.x.norm());
    EXPECT_LE((two.y - one.y).norm(), 1e-10 * one.y.norm());
  }
}

TEST(ExpAction, PreservesBlockStructure) {
  Rng rng(5);
  const auto scheme = GroupScheme::block(Side::kLeftRight, 7, 6, 3);
  GroupElement g = GroupElement::identity(scheme);
  for (int k = 0; k < 5; ++k) g = exp_action(g, random_direction(scheme, rng), 0.4);
  EXPECT_EQ(off_block_norm(scheme.left, g.x), 0.0);
  EXPECT_EQ(off_block_norm(scheme.right, g.y), 0.0);
  EXPECT_LE((g.x - g.x.adjoint()).norm(), 1e-12 * g.x.norm());
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<DenseMatrix>(g.x).eigenvalues().minCoeff(), 0.0);
}

TEST(Apply, IdentityAndLaw) {
  Rng rng(6);
  for (const auto& scheme : sample_schemes(4, 5)) {
    const DenseMatrix a = random_matrix(4, 5, rng);
    EXPECT_LE((geoprec::apply(GroupElement::identity(scheme), a) - a).norm(), 1e-14);

    const GroupElement g1 = random_element(scheme, rng);
    const GroupElement g2 = random_element(scheme, rng);
    GroupElement composed = g1;
    composed.x = g2.x * g1.x;
    composed.y = g2.y * g1.y;
    const DenseMatrix twice = geoprec::apply(g2, geoprec::apply(g1, a));
    EXPECT_LE((twice - geoprec::apply(composed, a)).norm(), 1e-10 * twice.norm());
  }
}

TEST(Apply, DiagonalRowScaling) {
  Eigen::MatrixXd a(3, 3);
  a << 3, 0, 0, 1, 1, 0, 0, 3, 1;
  const DenseMatrix ac = a.cast<Complex>();
  GroupElement g = GroupElement::identity(GroupScheme::diagonal(Side::kLeft, 3, 3));
  g.x(0, 0) = 1.0 / 3.0;
  DenseMatrix expected = ac;
  expected.row(0) /= 3.0;
  EXPECT_LE((geoprec::apply(g, ac) - expected).norm(), 1e-15);
}

TEST(Apply, SparseMatchesDense) {
  Rng rng(7);
  const auto scheme = GroupScheme::block(Side::kLeftRight, 5, 5, 2);
  const GroupElement g = random_element(scheme, rng);
  const auto a = ComplexMatrix::sparse(5, 5, {{0, 0, 1.0}, {1, 3, 2.0}, {4, 2, Complex(0, 1)}, {3, 3, -1.0}});
  const ComplexMatrix s = geoprec::apply(g, a);
  EXPECT_TRUE(s.is_sparse());
  EXPECT_LE((s.to_dense() - geoprec::apply(g, a.to_dense())).norm(), 1e-13);
}

TEST(Apply, PartnerIsContragredient) {
  Rng rng(8);
  const auto scheme = GroupScheme::full(Side::kLeftRight, 4, 4);
  const GroupElement g = random_element(scheme, rng);
  const DenseMatrix a = random_matrix(4, 4, rng);
  const DenseMatrix p = apply_partner(g, pseudoinverse(a));
  EXPECT_LE((p - geoprec::apply(g, a).inverse()).norm(), 1e-10 * p.norm());
}

TEST(Apply, DimensionMismatch) {
  const auto scheme = GroupScheme::diagonal(Side::kLeft, 3, 3);
  EXPECT_EQ(error_code([&] { geoprec::apply(GroupElement::identity(scheme), DenseMatrix(DenseMatrix::Zero(2, 3))); }),
            ErrorCode::kDimensionMismatch);
}

TEST(Repolarize, HermitianPositiveDefiniteUnchanged) {
  Rng rng(9);
  const auto scheme = GroupScheme::block(Side::kLeftRight, 4, 4, 2);
  const GroupElement g = random_element(scheme, rng);
  const GroupElement p = repolarize(g);
  EXPECT_LE((p.x - g.x).norm(), 1e-12 * g.x.norm());
  EXPECT_LE((p.y - g.y).norm(), 1e-12 * g.y.norm());
}

TEST(Repolarize, UnitaryBecomesIdentity) {
  Rng rng(10);
  GroupElement g = GroupElement::identity(GroupScheme::full(Side::kLeft, 5, 5));
  g.x = random_unitary(5, rng);
  EXPECT_LE((repolarize(g).x - DenseMatrix::Identity(5, 5)).norm(), 1e-12);
}

TEST(Repolarize, PreservesConditionOfAction) {
  Rng rng(11);
  for (const auto& scheme : sample_schemes(5, 5)) {
    const DenseMatrix a = random_matrix(5, 5, rng);
    GroupElement g = GroupElement::identity(scheme);
    // Generic invertible block-diagonal elements, not just positive ones.
    for (std::size_t b = 0; b < scheme.left.num_blocks(); ++b) {
      const Index o = scheme.left.offset(b), s = scheme.left.size(b);
      g.x.block(o, o, s, s) = rng.complex_gaussian(s, s);
    }
    if (scheme.two_sided())
      for (std::size_t b = 0; b < scheme.right.num_blocks(); ++b) {
        const Index o = scheme.right.offset(b), s = scheme.right.size(b);
        g.y.block(o, o, s, s) = rng.complex_gaussian(s, s);
      }
    const double before = condition_frobenius(geoprec::apply(g, a));
    const double after = condition_frobenius(geoprec::apply(repolarize(g), a));
    EXPECT_NEAR(after, before, 1e-9 * before);
  }
}

TEST(Repolarize, SingularBlockThrows) {
  GroupElement g = GroupElement::identity(GroupScheme::diagonal(Side::kLeft, 3, 3));
  g.x(1, 1) = 0.0;
  EXPECT_EQ(error_code([&] { repolarize(g); }), ErrorCode::kSingularBlock);
}

TEST(WeightData, Constants) {
  const auto l10 = weight_data(GroupScheme::diagonal(Side::kLeft, 10, 10));
  EXPECT_DOUBLE_EQ(l10.weight_norm, std::sqrt(2.0));
  EXPECT_NEAR(l10.weight_margin, std::pow(10.0, -1.5), 1e-15);
  const auto lr = weight_data(GroupScheme::diagonal(Side::kLeftRight, 5, 5));
  EXPECT_DOUBLE_EQ(lr.weight_norm, 2.0);
  EXPECT_NEAR(lr.weight_margin, std::pow(10.0, -1.5), 1e-15);
  const auto l1 = weight_data(GroupScheme::diagonal(Side::kLeft, 1, 1));
  EXPECT_DOUBLE_EQ(l1.weight_norm, std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(l1.weight_margin, 1.0);
}

TEST(HermitianBlockExp, DeterminantTraceIdentity) {
  Rng rng(12);
  for (const auto& scheme : sample_schemes(6, 6)) {
    const LieDirection h = random_direction(scheme, rng);
    const DenseMatrix e = hermitian_block_exp(scheme.left, h.h1, 0.5);
    const Complex det = e.determinant();
    const double expected = std::exp(0.5 * h.h1.trace().real());
    EXPECT_NEAR(det.real(), expected, 1e-8 * expected);
    EXPECT_NEAR(det.imag(), 0.0, 1e-8 * expected);
  }
}

TEST(BlockInverse, InvertsBlockwise) {
  Rng rng(13);
  const auto p = BlockPartition::uniform(6, 2);
  DenseMatrix x = DenseMatrix::Zero(6, 6);
  for (std::size_t b = 0; b < p.num_blocks(); ++b) x.block(p.offset(b), p.offset(b), 2, 2) = rng.complex_gaussian(2, 2);
  EXPECT_LE((block_inverse(p, x) * x - DenseMatrix::Identity(6, 6)).norm(), 1e-10);
}

}  // namespace
}  // namespace geoprec
