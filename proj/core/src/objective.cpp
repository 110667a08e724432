#include "geoprec/objective.hpp"

#include <algorithm>
#include <cmath>

#include "geoprec/errors.hpp"

namespace geoprec {

namespace {

// Diagonal blocks of m1 m1* (rows) or m1* m1 (cols), per block of p.
DenseMatrix block_gram(const BlockPartition& p, const DenseMatrix& m, bool rows) {
  DenseMatrix out = DenseMatrix::Zero(p.dimension(), p.dimension());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const Index o = p.offset(b);
    const Index s = p.size(b);
    if (rows)
      out.block(o, o, s, s).noalias() = m.middleRows(o, s) * m.middleRows(o, s).adjoint();
    else
      out.block(o, o, s, s).noalias() = m.middleCols(o, s).adjoint() * m.middleCols(o, s);
  }
  return out;
}

// Only the diagonal blocks survive the projection, so only those are formed.
void fill_gradient(ObjectiveState& s) {
  const double nb2 = s.norm_b * s.norm_b;
  const double nc2 = s.norm_partner * s.norm_partner;
  const GroupScheme& scheme = s.g.scheme;
  const DenseMatrix p = block_gram(scheme.left, s.b, true) / nb2 - block_gram(scheme.left, s.partner, false) / nc2;
  DenseMatrix q;
  if (scheme.two_sided())
    q = -block_gram(scheme.right, s.b, false) / nb2 + block_gram(scheme.right, s.partner, true) / nc2;
  s.grad = project_to_lie(scheme, p, q);
  s.grad_norm = norm(s.grad);
}

// Largest singular value from Lanczos on m* m with full reorthogonalization;
// the Krylov space is exhausted after min(rows, cols) steps.
double top_singular(const DenseMatrix& m) {
  const Index n = m.cols();
  const Index steps = std::min<Index>(std::min(m.rows(), n), 40);
  DenseMatrix q(n, steps + 1);
  q.col(0) = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  RealVector alpha(steps), beta(steps);
  Index k = 0;
  for (; k < steps; ++k) {
    Vector w = m.adjoint() * (m * q.col(k));
    alpha(k) = q.col(k).dot(w).real();
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(k + 1) * (q.leftCols(k + 1).adjoint() * w);
    beta(k) = w.norm();
    if (!(beta(k) > 1e-13 * std::abs(alpha(0)))) {
      ++k;
      break;
    }
    q.col(k + 1) = w / beta(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(alpha.head(k), beta.head(std::max<Index>(k - 1, 0)), Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

// Pseudoinverse of a well-conditioned full-rank b without an SVD: LU for
// square b, Cholesky of the row Gram for wide b. Empty when the rank is in doubt.
std::optional<DenseMatrix> fast_pseudoinverse(const DenseMatrix& b) {
  constexpr double kMinRcond = 1e-8;
  if (b.rows() == b.cols()) {
    Eigen::PartialPivLU<DenseMatrix> lu(b);
    // rcond is an estimate and can miss an exactly zero pivot.
    if (!(lu.rcond() > kMinRcond) || !(lu.matrixLU().diagonal().cwiseAbs().minCoeff() > 0.0)) return std::nullopt;
    DenseMatrix inv = lu.inverse();
    if (!inv.allFinite()) return std::nullopt;
    return inv;
  }
  if (b.rows() < b.cols()) {
    Eigen::LLT<DenseMatrix> llt(b * b.adjoint());
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond * kMinRcond)) return std::nullopt;
    DenseMatrix pinv = b.adjoint() * llt.solve(DenseMatrix::Identity(b.rows(), b.rows()));
    if (!pinv.allFinite()) return std::nullopt;
    return pinv;
  }
  return std::nullopt;
}

}  // namespace

ObjectiveState evaluate(const DenseMatrix& a, const GroupElement& g) {
  ObjectiveState s;
  s.g = g;
  s.b = geoprec::apply(g, a);
  if (s.b.isZero(0.0)) throw Error(ErrorCode::kZeroMatrix, "objective of zero matrix");
  if (auto fast = fast_pseudoinverse(s.b)) {
    s.partner = std::move(*fast);
    s.kappa = top_singular(s.b) * top_singular(s.partner);
  } else {
    const auto factors = svd(s.b);
    s.rank_deficient = factors.rank() < std::min(s.b.rows(), s.b.cols());
    s.partner = pseudoinverse(factors);
    s.kappa = factors.max_singular() / factors.min_nonzero_singular();
  }
  s.norm_b = s.b.norm();
  s.norm_partner = s.partner.norm();
  s.value = std::log(s.norm_b) + std::log(s.norm_partner);
  fill_gradient(s);
  return s;
}

ObjectiveState evaluate_cross(const DenseMatrix& a, const DenseMatrix& b, const GroupElement& g) {
  if (b.cols() != a.rows() || (g.scheme.two_sided() && b.rows() != a.cols()))
    throw Error(ErrorCode::kDimensionMismatch, "cross condition factors have incompatible shapes");
  ObjectiveState s;
  s.g = g;
  s.cross = true;
  s.b = geoprec::apply(g, a);
  s.partner = apply_partner(g, b);
  s.norm_b = s.b.norm();
  s.norm_partner = s.partner.norm();
  if (s.norm_b == 0.0 || s.norm_partner == 0.0)
    throw Error(ErrorCode::kZeroMatrix, "cross condition of zero matrix");
  s.value = std::log(s.norm_b) + std::log(s.norm_partner);
  s.kappa = top_singular(s.b) * top_singular(s.partner);
  fill_gradient(s);
  return s;
}

double hessian_quadratic_form(const ObjectiveState& s, const LieDirection& h) {
  if (h.h1.rows() != s.g.scheme.m() || h.h2.rows() != s.g.scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "direction does not match scheme");
  const double nb2 = s.norm_b * s.norm_b;
  const double nc2 = s.norm_partner * s.norm_partner;

  DenseMatrix u = h.h1 * s.b;
  DenseMatrix v = -s.partner * h.h1;
  if (s.g.scheme.two_sided()) {
    u -= s.b * h.h2;
    v += h.h2 * s.partner;
  }
  // <U, B> and <V, C> in the Hermitian inner product tr(X* Y).
  const Complex ub = (u.adjoint() * s.b).trace();
  const Complex vc = (v.adjoint() * s.partner).trace();

  const double pi_norm2 =
      u.squaredNorm() / nb2 + v.squaredNorm() / nc2 + 2.0 * (ub * std::conj(vc)).real() / (nb2 * nc2);
  const double pairing = ub.real() / nb2 + vc.real() / nc2;
  return 2.0 * (pi_norm2 - pairing * pairing);
}

std::optional<double> duality_gap_bound(double grad_norm, const WeightData& weights) {
  const double ratio = grad_norm / weights.weight_margin;
  if (!(ratio < 1.0)) return std::nullopt;
  return -0.5 * std::log1p(-ratio);
}

std::optional<double> duality_gap_bound(const ObjectiveState& state, const WeightData& weights) {
  return duality_gap_bound(state.grad_norm, weights);
}

}  // namespace geoprec
