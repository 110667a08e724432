#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "geoprec/optimizer.hpp"
#include "geoprec/rng.hpp"
#include "test_support.hpp"

namespace geoprec {
namespace {

using testing::error_code;
using testing::random_matrix;

DenseMatrix diag(const std::vector<double>& d) {
  DenseMatrix m = DenseMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return m;
}

DenseMatrix example1() {
  Eigen::MatrixXd a(3, 3);
  a << 3, 0, 0, 1, 1, 0, 0, 3, 1;
  return a.cast<Complex>();
}

// Optimal kF over left diagonal scalings of invertible A. With r_i the squared
// row norms of A and c_i the squared column norms of A^-1,
//   kF(XA)^2 = (sum x_i^2 r_i)(sum x_i^-2 c_i) >= (sum sqrt(r_i c_i))^2
// by Cauchy-Schwarz, with equality at x_i^2 = sqrt(c_i / r_i).
double left_diagonal_optimum(const DenseMatrix& a) {
  const DenseMatrix inv = a.inverse();
  double s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) s += std::sqrt(a.row(i).squaredNorm() * inv.col(i).squaredNorm());
  return s;
}

OptimizerConfig left_diagonal(Index n, double eps) {
  OptimizerConfig c;
  c.scheme = GroupScheme::diagonal(Side::kLeft, n, n);
  c.target_eps = eps;
  return c;
}

void expect_monotone(const OptimizationReport& r) {
  for (std::size_t k = 1; k < r.iterations.size(); ++k) {
    EXPECT_LE(r.iterations[k].value, r.iterations[k - 1].value + 1e-12) << "iteration " << k;
    EXPECT_LE(r.iterations[k].grad_norm, r.iterations[k - 1].grad_norm + 1e-12) << "iteration " << k;
  }
}

TEST(MinimizeCondition, DiagonalTwoByTwoReachesTwo) {
  const auto r = minimize_condition(diag({1.0, 10.0}), left_diagonal(2, 1e-3));
  EXPECT_EQ(r.termination, Termination::kCertified);
  EXPECT_EQ(r.mode, OptimizerMode::kStronglyConvex);
  EXPECT_NEAR(r.final_kF, 2.0, 1e-3);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_LE(*r.certificate, 1e-3);
  EXPECT_NEAR(r.initial_kF, condition_frobenius(diag({1.0, 10.0})), 1e-12);
  EXPECT_NEAR(r.initial_kappa, 10.0, 1e-9);
  EXPECT_DOUBLE_EQ(r.step, 0.25);
  expect_monotone(r);
}

TEST(MinimizeCondition, IdentityStopsImmediately) {
  const auto r = minimize_condition(DenseMatrix(DenseMatrix::Identity(4, 4)), left_diagonal(4, 1e-3));
  ASSERT_EQ(r.iterations.size(), 1u);
  EXPECT_EQ(r.iterations[0].grad_norm, 0.0);
  EXPECT_EQ(r.termination, Termination::kCertified);
  EXPECT_EQ(r.certificate, 0.0);
}

TEST(MinimizeCondition, ExampleOneAgainstClosedForm) {
  const DenseMatrix a = example1();
  OptimizerConfig c = left_diagonal(3, 1e-2);
  c.mode = OptimizerMode::kGeneral;
  const auto r = minimize_condition(a, c);
  EXPECT_EQ(r.termination, Termination::kCertified);
  EXPECT_LT(r.final_kF, condition_frobenius(a));
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_LE(*r.certificate, 1e-2);
  const double star = left_diagonal_optimum(a);
  EXPECT_GE(r.final_kF, star * (1 - 1e-12));
  EXPECT_LE(std::log(r.final_kF / star), *r.certificate + 1e-8);
  expect_monotone(r);
}

TEST(MinimizeCondition, CertificatesAreSound) {
  Rng rng(1);
  for (int trial = 0; trial < 8; ++trial) {
    const Index n = 2 + trial % 4;
    const DenseMatrix a = random_matrix(n, n, rng, trial % 2 == 1);
    for (OptimizerMode mode : {OptimizerMode::kGeneral, OptimizerMode::kStronglyConvex}) {
      OptimizerConfig c = left_diagonal(n, 1e-2);
      c.mode = mode;
      c.max_iters = 200000;
      const auto r = minimize_condition(a, c);
      ASSERT_EQ(r.termination, Termination::kCertified);
      const double star = left_diagonal_optimum(a);
      EXPECT_LE(std::log(r.final_kF / star), *r.certificate + 1e-8);
      expect_monotone(r);
      if (mode == OptimizerMode::kGeneral)
        EXPECT_LE(static_cast<long long>(r.iterations.size()) - 1, predicted_iteration_bound(a, c, star));
    }
  }
}

TEST(MinimizeCondition, DiagonalOptimumIsDimension) {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> d;
    for (int i = 0; i < 4; ++i) d.push_back(std::exp(rng.uniform(-2.0, 2.0)));
    const auto r = minimize_condition(diag(d), left_diagonal(4, 1e-4));
    ASSERT_EQ(r.termination, Termination::kCertified);
    EXPECT_LE(std::log(r.final_kF / 4.0), *r.certificate + 1e-8);
    EXPECT_LE(static_cast<long long>(r.iterations.size()) - 1,
              predicted_iteration_bound(diag(d), left_diagonal(4, 1e-4), 4.0));
  }
}

TEST(MinimizeCondition, MonotoneOnAllSchemes) {
  Rng rng(3);
  for (Side side : {Side::kLeft, Side::kLeftRight})
    for (auto kind : {testing::SchemeKind::kDiagonal, testing::SchemeKind::kBlock, testing::SchemeKind::kFull}) {
      OptimizerConfig c;
      c.scheme = testing::make_scheme(kind, side, 6, 6);
      c.max_iters = 150;
      c.mode = OptimizerMode::kGeneral;
      const auto r = minimize_condition(random_matrix(6, 6, rng), c);
      expect_monotone(r);
      EXPECT_LE(r.final_kF, r.initial_kF);
      EXPECT_DOUBLE_EQ(r.step, side == Side::kLeft ? 0.25 : 0.125);
    }
}

TEST(MinimizeCondition, MaxItersStopsWithRecords) {
  Rng rng(4);
  OptimizerConfig c = left_diagonal(5, 1e-12);
  c.max_iters = 3;
  const auto r = minimize_condition(random_matrix(5, 5, rng), c);
  EXPECT_EQ(r.termination, Termination::kMaxIters);
  ASSERT_EQ(r.iterations.size(), 4u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(r.iterations[static_cast<std::size_t>(k)].iter, k);
}

TEST(MinimizeCondition, GradTolOverrideConverges) {
  Rng rng(5);
  OptimizerConfig c;
  c.scheme = GroupScheme::diagonal(Side::kLeftRight, 8, 8);
  c.target_eps = 1e-12;
  c.grad_tol_override = 1e-2;
  const auto r = minimize_condition(random_matrix(8, 8, rng), c);
  EXPECT_EQ(r.termination, Termination::kConverged);
  EXPECT_LE(r.iterations.back().grad_norm, 1e-2);
}

TEST(MinimizeCondition, CertifiedWinsTie) {
  OptimizerConfig c = left_diagonal(3, 1e-3);
  c.grad_tol_override = 1.0;
  EXPECT_EQ(minimize_condition(DenseMatrix(DenseMatrix::Identity(3, 3)), c).termination, Termination::kCertified);
}

TEST(MinimizeCondition, AutoModeSelection) {
  Rng rng(6);
  const DenseMatrix a = random_matrix(4, 4, rng);
  OptimizerConfig c = left_diagonal(4, 1e-2);
  c.max_iters = 5;
  EXPECT_EQ(minimize_condition(a, c).mode, OptimizerMode::kStronglyConvex);
  c.scheme = GroupScheme::diagonal(Side::kLeftRight, 4, 4);
  EXPECT_EQ(minimize_condition(a, c).mode, OptimizerMode::kGeneral);

  DenseMatrix deficient = a;
  deficient.row(3) = deficient.row(0);
  c.scheme = GroupScheme::diagonal(Side::kLeft, 4, 4);
  EXPECT_EQ(minimize_condition(deficient, c).mode, OptimizerMode::kGeneral);
  c.mode = OptimizerMode::kStronglyConvex;
  EXPECT_EQ(error_code([&] { minimize_condition(deficient, c); }), ErrorCode::kRankDeficient);
}

TEST(MinimizeCondition, InvalidInputs) {
  OptimizerConfig c = left_diagonal(3, 1e-2);
  EXPECT_EQ(error_code([&] { minimize_condition(DenseMatrix(DenseMatrix::Identity(4, 4)), c); }),
            ErrorCode::kDimensionMismatch);
  EXPECT_EQ(error_code([&] { minimize_condition(DenseMatrix(DenseMatrix::Zero(3, 3)), c); }), ErrorCode::kZeroMatrix);
  c.step_size = -1.0;
  EXPECT_EQ(error_code([&] { minimize_condition(DenseMatrix(DenseMatrix::Identity(3, 3)), c); }),
            ErrorCode::kInvalidArgument);
}

TEST(MinimizeCondition, StepSizeOverride) {
  OptimizerConfig c = left_diagonal(2, 1e-3);
  c.step_size = 0.1;
  const auto r = minimize_condition(diag({1.0, 3.0}), c);
  EXPECT_DOUBLE_EQ(r.step, 0.1);
  EXPECT_EQ(r.termination, Termination::kCertified);
}

TEST(MinimizeCondition, StronglyConvexLinearRate) {
  // f* = log 2; the gap contracts at least as fast as 1 - mu/L per step.
  OptimizerConfig c = left_diagonal(2, 1e-14);
  c.max_iters = 60;
  c.mode = OptimizerMode::kStronglyConvex;
  const auto r = minimize_condition(diag({1.0, 10.0}), c);
  const double kf0 = r.initial_kF;
  const double rate = std::log(1.0 - (4.0 / (kf0 * kf0)) / 4.0);
  const double gap0 = r.iterations[0].value - std::log(2.0);
  for (const auto& rec : r.iterations) {
    const double gap = rec.value - std::log(2.0);
    if (gap < 1e-13) break;
    EXPECT_LE(std::log(gap), std::log(gap0) + rate * rec.iter + 1e-9);
  }
}

TEST(MinimizeCrossCondition, PseudoinversePartnerMatchesCondition) {
  Rng rng(7);
  const DenseMatrix a = random_matrix(4, 4, rng);
  OptimizerConfig c;
  c.scheme = GroupScheme::block(Side::kLeftRight, 4, 4, 2);
  c.max_iters = 50;
  c.mode = OptimizerMode::kGeneral;
  const auto direct = minimize_condition(a, c);
  const auto cross = minimize_cross_condition(a, pseudoinverse(a), c);
  ASSERT_EQ(direct.iterations.size(), cross.iterations.size());
  for (std::size_t k = 0; k < direct.iterations.size(); ++k) {
    EXPECT_NEAR(direct.iterations[k].value, cross.iterations[k].value, 1e-10);
    EXPECT_NEAR(direct.iterations[k].grad_norm, cross.iterations[k].grad_norm, 1e-10);
  }
  EXPECT_LE((direct.final_element.x - cross.final_element.x).norm(), 1e-10);
}

TEST(MinimizeCrossCondition, IdentityPairIsStationary) {
  OptimizerConfig c;
  c.scheme = GroupScheme::diagonal(Side::kLeftRight, 3, 3);
  const DenseMatrix i3 = DenseMatrix::Identity(3, 3);
  const auto r = minimize_cross_condition(i3, i3, c);
  EXPECT_EQ(r.iterations[0].grad_norm, 0.0);
  EXPECT_EQ(r.iterations.size(), 1u);
}

TEST(MinimizeCrossCondition, RandomPairDescends) {
  Rng rng(8);
  OptimizerConfig c;
  c.scheme = GroupScheme::diagonal(Side::kLeftRight, 4, 4);
  c.max_iters = 500;
  const auto r = minimize_cross_condition(random_matrix(4, 4, rng), random_matrix(4, 4, rng), c);
  expect_monotone(r);
  EXPECT_LE(r.final_kF, r.initial_kF);
  c.mode = OptimizerMode::kStronglyConvex;
  EXPECT_EQ(error_code([&] { minimize_cross_condition(DenseMatrix(DenseMatrix::Identity(4, 4)),
                                                      DenseMatrix(DenseMatrix::Identity(4, 4)), c); }),
            ErrorCode::kInvalidArgument);
}

TEST(PredictedIterationBound, Examples) {
  // d = (1, 1, x) with kF = 10: (2 + x^2)(2 + x^-2) = 100.
  const double s = 47.5;
  const double x = std::sqrt((s + std::sqrt(s * s - 4.0)) / 2.0);
  const DenseMatrix a = diag({1.0, 1.0, x});
  ASSERT_NEAR(condition_frobenius(a), 10.0, 1e-12);

  OptimizerConfig c = left_diagonal(3, 0.1);
  c.mode = OptimizerMode::kGeneral;
  const double tol = 0.1 * std::pow(3.0, -1.5);
  EXPECT_EQ(predicted_iteration_bound(a, c, 5.0),
            static_cast<long long>(std::ceil(2.0 * 4.0 * std::log(2.0) / (tol * tol))));
  EXPECT_EQ(predicted_iteration_bound(a, c, 10.0), 0);

  c.mode = OptimizerMode::kStronglyConvex;
  c.target_eps = 1e-3;
  EXPECT_EQ(predicted_iteration_bound(a, c, 3.0),
            static_cast<long long>(std::ceil(100.0 * std::log(std::log(10.0 / 3.0) / 1e-3))));
  EXPECT_EQ(error_code([&] { predicted_iteration_bound(a, c, 0.0); }), ErrorCode::kInvalidArgument);
}

TEST(Termination, Names) {
  EXPECT_STREQ(to_string(Termination::kConverged), "converged");
  EXPECT_STREQ(to_string(Termination::kMaxIters), "max_iters");
  EXPECT_STREQ(to_string(Termination::kCertified), "certified");
}

}  // namespace
}  // namespace geoprec
