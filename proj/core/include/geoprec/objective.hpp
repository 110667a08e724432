#pragma once

#include <optional>

#include "geoprec/group.hpp"

namespace geoprec {

/// Snapshot of the log-condition objective at a group element.
///
/// For the condition objective C_A the partner factor is pinv(X A Y^-1); for
/// the cross objective C_{A,B} it is Y B X^-1. In both cases
///
///   value = log ||b||_F + log ||partner||_F,
///   grad  = proj( b b*/||b||^2 - partner* partner/||partner||^2,
///                -b* b/||b||^2 + partner partner*/||partner||^2 ).
struct ObjectiveState {
  GroupElement g;
  DenseMatrix b;
  DenseMatrix partner;
  bool cross = false;
  double norm_b = 0.0;
  double norm_partner = 0.0;
  double value = 0.0;
  LieDirection grad;
  double grad_norm = 0.0;
  // sigma_max(b) * sigma_max(partner); equals the Euclidean condition number
  // of b for the condition objective.
  double kappa = 0.0;
  bool rank_deficient = false;

  double frobenius_condition() const { return norm_b * norm_partner; }
};

/// C_A at g, with kappa = kappa_F(X A Y^-1). Rank-deficient A is evaluated
/// through the pseudoinverse and flagged. Throws ZeroMatrix, DimensionMismatch.
ObjectiveState evaluate(const DenseMatrix& a, const GroupElement& g);

/// C_{A,B} at g: log ||X A Y^-1||_F + log ||Y B X^-1||_F.
ObjectiveState evaluate_cross(const DenseMatrix& a, const DenseMatrix& b, const GroupElement& g);

inline const LieDirection& gradient(const ObjectiveState& state) { return state.grad; }

/// <H, Hess H> from the Kempf-Ness identity
///   1/2 <Hess H, H> = ||Pi(H) w||^2 - <Pi(H) w, w>^2,   w = b (x) partner / norm,
/// with Pi(H)(b (x) c) = (H1 b - b H2) (x) c + b (x) (H2 c - c H1). Expanded into
/// traces of m x m and n x n products; the mn x mn tensor is never formed.
double hessian_quadratic_form(const ObjectiveState& state, const LieDirection& h);

/// Upper bound on log kappa_F(current) - log kappa_F*, from the
/// non-commutative duality lower bound: -1/2 log(1 - ||grad|| / gamma).
/// Empty when ||grad|| >= gamma (the bound is vacuous).
std::optional<double> duality_gap_bound(double grad_norm, const WeightData& weights);
std::optional<double> duality_gap_bound(const ObjectiveState& state, const WeightData& weights);

}  // namespace geoprec
