#include "geoprec/stochastic.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "geoprec/errors.hpp"
#include "geoprec/rng.hpp"

namespace geoprec {

LinearOperator::LinearOperator(Index rows, Index cols, Map matvec, Map rmatvec)
    : rows_(rows),
      cols_(cols),
      matvec_(std::move(matvec)),
      rmatvec_(std::move(rmatvec)),
      count_(std::make_shared<std::atomic<std::size_t>>(0)) {}

LinearOperator LinearOperator::from_matrix(const ComplexMatrix& a) {
  auto shared = std::make_shared<ComplexMatrix>(a);
  return LinearOperator(
      a.rows(), a.cols(), [shared](const Vector& v) { return shared->multiply(v); },
      [shared](const Vector& v) { return shared->adjoint_multiply(v); });
}

LinearOperator LinearOperator::gram(const LinearOperator& a) {
  auto apply = [a](const Vector& v) { return a.apply(a.apply_adjoint(v)); };
  return LinearOperator(a.rows(), a.rows(), apply, apply);
}

LinearOperator LinearOperator::gram_adjoint(const LinearOperator& a) {
  auto apply = [a](const Vector& v) { return a.apply_adjoint(a.apply(v)); };
  return LinearOperator(a.cols(), a.cols(), apply, apply);
}

Vector LinearOperator::apply(const Vector& v) const {
  if (v.size() != cols_) throw Error(ErrorCode::kDimensionMismatch, "operator input size");
  count_->fetch_add(1);
  return matvec_(v);
}

Vector LinearOperator::apply_adjoint(const Vector& v) const {
  if (v.size() != rows_) throw Error(ErrorCode::kDimensionMismatch, "operator input size");
  count_->fetch_add(1);
  return rmatvec_(v);
}

double LinearOperator::adjoint_defect(std::uint64_t seed) const {
  Rng rng(seed);
  const Vector v = rng.complex_gaussian(cols_, 1);
  const Vector w = rng.complex_gaussian(rows_, 1);
  const Vector av = matvec_(v);
  const Vector aw = rmatvec_(w);
  const double scale = std::max(av.norm() * w.norm(), v.norm() * aw.norm());
  if (scale == 0.0) return 0.0;
  return std::abs(w.dot(av) - aw.dot(v)) / scale;
}

CgResult conjugate_gradient(const LinearOperator& m, const Vector& b, double tol, int max_iters) {
  CgResult out;
  out.x = Vector::Zero(b.size());
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    out.converged = true;
    return out;
  }
  Vector r = b;
  Vector p = r;
  double rr = r.squaredNorm();
  for (int k = 0; k < max_iters; ++k) {
    const Vector mp = m.apply(p);
    const double pmp = p.dot(mp).real();
    if (!(pmp > 0.0)) break;  // M not positive definite along p
    const double alpha = rr / pmp;
    out.x += alpha * p;
    r -= alpha * mp;
    out.iterations = k + 1;
    const double rr_next = r.squaredNorm();
    if (std::sqrt(rr_next) <= tol * bnorm) {
      rr = rr_next;
      out.converged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  out.relative_residual = std::sqrt(rr) / bnorm;
  out.converged = out.converged || out.relative_residual <= tol;
  return out;
}

namespace {

Vector draw_probe(Index n, ProbeKind kind, Rng& rng) {
  Vector z(n);
  for (Index i = 0; i < n; ++i) z(i) = kind == ProbeKind::kRademacher ? rng.rademacher() : rng.normal();
  return z;
}

DiagonalEstimate hutchinson_impl(Index n, const EstimatorConfig& config,
                                 const std::function<Vector(const Vector&, int)>& apply) {
  if (config.num_probes < 1) throw Error(ErrorCode::kInvalidArgument, "num_probes must be positive");
  RealVector sum = RealVector::Zero(n);
  RealVector sum_sq = RealVector::Zero(n);
  for (int p = 0; p < config.num_probes; ++p) {
    Rng rng(config.seed, static_cast<std::uint64_t>(p));
    const Vector z = draw_probe(n, config.probe_kind, rng);
    const RealVector sample = z.cwiseProduct(apply(z, p)).real();
    sum += sample;
    sum_sq += sample.cwiseAbs2();
  }
  const double count = config.num_probes;
  DiagonalEstimate out;
  out.estimate = sum / count;
  out.standard_error = RealVector::Zero(n);
  if (config.num_probes > 1) {
    const RealVector var = ((sum_sq - count * out.estimate.cwiseAbs2()) / (count - 1.0)).cwiseMax(0.0);
    out.standard_error = (var / count).cwiseSqrt();
  }
  return out;
}

Vector solve_or_throw(const LinearOperator& m, const Vector& b, double tol, int max_iters,
                      std::size_t index) {
  const CgResult res = conjugate_gradient(m, b, tol, max_iters);
  if (!res.converged)
    throw Error(ErrorCode::kNotConverged,
                "conjugate gradient stalled at relative residual " + std::to_string(res.relative_residual),
                index);
  return res.x;
}

}  // namespace

DiagonalEstimate hutchinson_diagonal(const LinearOperator& m, const EstimatorConfig& config) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::kDimensionMismatch, "diagonal of a non-square operator");
  return hutchinson_impl(m.rows(), config, [&](const Vector& z, int) { return m.apply(z); });
}

DiagonalEstimate hutchinson_diagonal_inverse(const LinearOperator& a, const EstimatorConfig& config) {
  const LinearOperator gram = LinearOperator::gram(a);
  return hutchinson_impl(a.rows(), config, [&](const Vector& z, int p) {
    return solve_or_throw(gram, z, config.cg_tol, config.cg_max_iters, static_cast<std::size_t>(p));
  });
}

LinearOperator inverse_operator(const LinearOperator& m, double tol, int max_iters) {
  auto solve = [m, tol, max_iters](const Vector& b) {
    return solve_or_throw(m, b, tol, max_iters, 0);
  };
  return LinearOperator(m.rows(), m.cols(), solve, solve);
}

namespace {

// Gaussian probes whose restriction to every (offset, size) row range has full
// row rank; one resample is allowed.
Eigen::MatrixXd block_probes(Index n, const std::vector<std::pair<Index, Index>>& ranges,
                             int num_probes, std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed, attempt);
    const Eigen::MatrixXd g = rng.gaussian(n, num_probes);
    std::optional<std::size_t> bad;
    for (std::size_t b = 0; b < ranges.size() && !bad; ++b) {
      Eigen::JacobiSVD<Eigen::MatrixXd> s(g.middleRows(ranges[b].first, ranges[b].second));
      const auto& sv = s.singularValues();
      if (!(sv(sv.size() - 1) > 1e-12 * sv(0))) bad = b;
    }
    if (!bad) return g;
    if (attempt == 1) throw Error(ErrorCode::kSingularProbeBlock, "rank-deficient probe block", *bad);
  }
}

DenseMatrix block_estimate(const DenseMatrix& z_r, const Eigen::MatrixXd& g_r) {
  const DenseMatrix est = z_r * pseudoinverse(ComplexMatrix::from_real(g_r));
  return 0.5 * (est + est.adjoint());
}

}  // namespace

DenseMatrix block_hutchinson_diagonal(const LinearOperator& m, const BlockPartition& partition,
                                      int num_probes, std::uint64_t seed) {
  const Index n = m.rows();
  if (m.cols() != n || partition.dimension() != n)
    throw Error(ErrorCode::kDimensionMismatch, "partition does not match operator");
  if (num_probes < partition.max_block())
    throw Error(ErrorCode::kInvalidArgument, "need at least as many probes as the block size");
  std::vector<std::pair<Index, Index>> ranges;
  for (std::size_t b = 0; b < partition.num_blocks(); ++b)
    ranges.emplace_back(partition.offset(b), partition.size(b));
  const Eigen::MatrixXd g = block_probes(n, ranges, num_probes, seed);
  DenseMatrix z(n, num_probes);
  for (int p = 0; p < num_probes; ++p) z.col(p) = m.apply(g.col(p).cast<Complex>());
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    const Index o = partition.offset(b);
    const Index s = partition.size(b);
    out.block(o, o, s, s) = block_estimate(z.middleRows(o, s), g.middleRows(o, s));
  }
  return out;
}

DenseMatrix block_hutchinson(const LinearOperator& m, Index offset, Index size, int num_probes,
                             std::uint64_t seed) {
  const Index n = m.rows();
  if (m.cols() != n || offset < 0 || size < 1 || offset + size > n)
    throw Error(ErrorCode::kDimensionMismatch, "block range outside operator");
  if (num_probes < size)
    throw Error(ErrorCode::kInvalidArgument, "need at least as many probes as the block size");
  const Eigen::MatrixXd probes = block_probes(n, {{offset, size}}, num_probes, seed);
  DenseMatrix z_r(size, num_probes);
  for (int p = 0; p < num_probes; ++p)
    z_r.col(p) = m.apply(probes.col(p).cast<Complex>()).segment(offset, size);
  return block_estimate(z_r, probes.middleRows(offset, size));
}

LanczosResult block_lanczos_inverse_block(const LinearOperator& m, Index offset, Index size, int iters) {
  const Index n = m.rows();
  if (m.cols() != n || offset < 0 || size < 1 || offset + size > n)
    throw Error(ErrorCode::kDimensionMismatch, "block range outside operator");
  if (iters < 1) throw Error(ErrorCode::kInvalidArgument, "lanczos iterations must be positive");

  auto apply_block = [&m](const DenseMatrix& q) {
    DenseMatrix out(q.rows(), q.cols());
    for (Index c = 0; c < q.cols(); ++c) out.col(c) = m.apply(q.col(c));
    return out;
  };

  std::vector<DenseMatrix> basis;
  std::vector<DenseMatrix> diag;
  std::vector<DenseMatrix> sub;  // basis[j+1] * sub[j] = residual of step j
  basis.push_back(DenseMatrix::Identity(n, n).middleCols(offset, size));
  LanczosResult out;
  double scale = 0.0;

  for (int j = 0; j < iters; ++j) {
    const DenseMatrix& q = basis.back();
    DenseMatrix w = apply_block(q);
    DenseMatrix a = q.adjoint() * w;
    a = 0.5 * (a + a.adjoint());
    diag.push_back(a);
    scale = std::max(scale, a.norm());
    w -= q * a;
    if (j > 0) w -= basis[basis.size() - 2] * sub.back().adjoint();
    for (int pass = 0; pass < 2; ++pass)
      for (const DenseMatrix& v : basis) w -= v * (v.adjoint() * w);
    out.iterations = j + 1;
    if (j + 1 == iters) break;
    Eigen::JacobiSVD<DenseMatrix> s(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = s.singularValues();
    if (!(sv(sv.size() - 1) > 1e-10 * scale) || n <= static_cast<Index>(basis.size()) * size) {
      out.breakdown = true;
      break;
    }
    basis.push_back(s.matrixU());
    sub.push_back(sv.cast<Complex>().asDiagonal() * s.matrixV().adjoint());
  }

  const Index k = static_cast<Index>(diag.size());
  DenseMatrix t = DenseMatrix::Zero(k * size, k * size);
  for (Index j = 0; j < k; ++j) {
    t.block(j * size, j * size, size, size) = diag[static_cast<std::size_t>(j)];
    if (j + 1 < k) {
      const DenseMatrix& b = sub[static_cast<std::size_t>(j)];
      t.block((j + 1) * size, j * size, size, size) = b;
      t.block(j * size, (j + 1) * size, size, size) = b.adjoint();
    }
  }
  const DenseMatrix e1 = DenseMatrix::Identity(k * size, size);
  Eigen::LDLT<DenseMatrix> ldlt(t);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw Error(ErrorCode::kNotConverged, "Jacobi matrix is not positive definite");
  const DenseMatrix block = ldlt.solve(e1).topRows(size);
  out.block = 0.5 * (block + block.adjoint());
  return out;
}

namespace {

// Block-diagonal part of the Gram matrix of the rows of s.
DenseMatrix row_block_gram(const Eigen::SparseMatrix<Complex, Eigen::RowMajor>& s,
                           const BlockPartition& partition) {
  const Index n = partition.dimension();
  DenseMatrix out = DenseMatrix::Zero(n, n);
  for (std::size_t b = 0; b < partition.num_blocks(); ++b) {
    const Index o = partition.offset(b);
    const Index sz = partition.size(b);
    const Eigen::SparseMatrix<Complex, Eigen::RowMajor> rows = s.middleRows(o, sz);
    out.block(o, o, sz, sz) = DenseMatrix(rows * rows.adjoint());
  }
  return out;
}

DenseMatrix estimate_inverse_blocks(const LinearOperator& gram, const BlockPartition& partition,
                                    const EstimatorConfig& config, std::uint64_t stream) {
  const LinearOperator inv = inverse_operator(gram, config.cg_tol, config.cg_max_iters);
  EstimatorConfig sub = config;
  sub.seed = split_seed(config.seed, stream);
  if (partition.is_diagonal())
    return hutchinson_diagonal(inv, sub).estimate.cast<Complex>().asDiagonal();
  return block_hutchinson_diagonal(inv, partition, sub.num_probes, sub.seed);
}

}  // namespace

LieDirection estimate_gradient(const ComplexMatrix& a, const GroupElement& g,
                               const EstimatorConfig& config) {
  const GroupScheme& scheme = g.scheme;
  const ComplexMatrix b = geoprec::apply(g, a);
  const SparseMatrix bs = b.to_sparse();
  const double nb2 = bs.squaredNorm();
  if (nb2 == 0.0) throw Error(ErrorCode::kZeroMatrix, "gradient of zero matrix");
  const LinearOperator op = LinearOperator::from_matrix(b);

  // Each side's pinv Gram estimate is normalized by its own trace so both
  // components stay exactly traceless.
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> rows = bs;
  const DenseMatrix left_inv = estimate_inverse_blocks(LinearOperator::gram(op), scheme.left, config, 0);
  const DenseMatrix p = row_block_gram(rows, scheme.left) / nb2 - left_inv / left_inv.trace().real();

  DenseMatrix q;
  if (scheme.two_sided()) {
    const Eigen::SparseMatrix<Complex, Eigen::RowMajor> cols = bs.adjoint();
    const DenseMatrix right_inv =
        estimate_inverse_blocks(LinearOperator::gram_adjoint(op), scheme.right, config, 1);
    q = -row_block_gram(cols, scheme.right) / nb2 + right_inv / right_inv.trace().real();
  }
  return project_to_lie(scheme, p, q);
}

OptimizationReport minimize_condition_stochastic(const ComplexMatrix& a, const OptimizerConfig& config,
                                                 const EstimatorConfig& estimator) {
  if (a.rows() != config.scheme.m() || a.cols() != config.scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "matrix does not match scheme");
  const DenseMatrix dense = a.to_dense();
  const WeightData weights = weight_data(config.scheme);
  OptimizationReport report;
  report.mode = OptimizerMode::kGeneral;
  report.step = config.step_size.value_or(1.0 / smoothness(config.scheme));

  GroupElement g = GroupElement::identity(config.scheme);
  for (int k = 0;; ++k) {
    const ObjectiveState s = evaluate(dense, g);
    const auto bound = duality_gap_bound(s, weights);
    report.iterations.push_back({k, s.value, s.grad_norm, bound, s.frobenius_condition(), s.kappa});
    if (k == 0) {
      report.initial_kF = s.frobenius_condition();
      report.initial_kappa = s.kappa;
    }
    report.final_element = g;
    report.final_kF = s.frobenius_condition();
    report.final_kappa = s.kappa;
    report.certificate = bound;
    if (bound && *bound <= config.target_eps) {
      report.termination = Termination::kCertified;
      break;
    }
    if (k >= config.max_iters) {
      report.termination = Termination::kMaxIters;
      break;
    }
    EstimatorConfig est = estimator;
    est.seed = split_seed(estimator.seed, static_cast<std::uint64_t>(k));
    const LieDirection grad = estimate_gradient(a, g, est);
    if (config.grad_tol_override && norm(grad) <= *config.grad_tol_override) {
      report.termination = Termination::kConverged;
      break;
    }
    g = exp_action(g, grad, -report.step);
  }
  return report;
}

}  // namespace geoprec
