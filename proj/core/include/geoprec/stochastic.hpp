#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>

#include "geoprec/group.hpp"
#include "geoprec/matrix.hpp"
#include "geoprec/optimizer.hpp"

namespace geoprec {

/// Matrix-free operator v -> A v, v -> A* v. Copies share one matvec counter;
/// every call to apply or apply_adjoint adds one.
class LinearOperator {
 public:
  using Map = std::function<Vector(const Vector&)>;

  LinearOperator(Index rows, Index cols, Map matvec, Map rmatvec);

  static LinearOperator from_matrix(const ComplexMatrix& a);
  /// A A* built from a; each application costs two matvecs on a's counter.
  static LinearOperator gram(const LinearOperator& a);
  /// A* A, the column Gram.
  static LinearOperator gram_adjoint(const LinearOperator& a);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }

  Vector apply(const Vector& v) const;
  Vector apply_adjoint(const Vector& v) const;

  std::size_t matvec_count() const noexcept { return count_->load(); }
  void reset_count() noexcept { count_->store(0); }

  /// Relative defect |<Av, w> - <v, A*w>| / (|Av||w|) on one random pair.
  /// Does not touch this operator's counter; operators built from another one
  /// (gram, gram_adjoint) still count on the inner operator.
  double adjoint_defect(std::uint64_t seed) const;

 private:
  Index rows_;
  Index cols_;
  Map matvec_;
  Map rmatvec_;
  std::shared_ptr<std::atomic<std::size_t>> count_;
};

enum class ProbeKind { kRademacher, kGaussian };

struct EstimatorConfig {
  int num_probes = 100;
  ProbeKind probe_kind = ProbeKind::kRademacher;
  double cg_tol = 1e-8;
  int cg_max_iters = 1000;
  int lanczos_iters = 20;
  std::uint64_t seed = 0;
};

struct CgResult {
  Vector x;
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

/// Conjugate gradients for Hermitian positive definite M. Never throws on
/// non-convergence; the caller inspects `converged`.
CgResult conjugate_gradient(const LinearOperator& m, const Vector& b, double tol, int max_iters);

struct DiagonalEstimate {
  RealVector estimate;
  RealVector standard_error;
};

/// Hutchinson estimate (1/p) sum z .* (M z) of diag(M) for Hermitian M.
DiagonalEstimate hutchinson_diagonal(const LinearOperator& m, const EstimatorConfig& config);

/// Hutchinson estimate of diag((A A*)^-1), one CG solve per probe.
/// Throws NotConverged with the probe index.
DiagonalEstimate hutchinson_diagonal_inverse(const LinearOperator& a, const EstimatorConfig& config);

/// M applied through CG solves; throws NotConverged when a solve fails.
LinearOperator inverse_operator(const LinearOperator& m, double tol, int max_iters);

/// Estimate of the diagonal block M[o:o+r, o:o+r] as Z_r pinv(G_r), Z = M G,
/// from Gaussian probes G (n x p), Hermitian-symmetrized. Throws
/// SingularProbeBlock if G_r stays rank deficient after one resample.
DenseMatrix block_hutchinson(const LinearOperator& m, Index offset, Index size, int num_probes,
                             std::uint64_t seed);

/// All diagonal blocks of a partition from one shared probe set; the result is
/// block diagonal.
DenseMatrix block_hutchinson_diagonal(const LinearOperator& m, const BlockPartition& partition,
                                      int num_probes, std::uint64_t seed);

struct LanczosResult {
  DenseMatrix block;
  int iterations = 0;
  // Krylov space became invariant at `iterations`; the quadrature is exact there.
  bool breakdown = false;
};

/// Block Gauss quadrature E* M^-1 E for E the coordinate vectors of
/// [offset, offset + size), from `iters` block Lanczos steps with full
/// reorthogonalization.
LanczosResult block_lanczos_inverse_block(const LinearOperator& m, Index offset, Index size, int iters);

/// Gradient of log kF(X A Y^-1) with the Gram terms of pinv(B) estimated
/// matrix-free. B must have full row rank (left) or be invertible (left_right).
/// Diagonal partitions use Hutchinson; coarser partitions use block Hutchinson.
LieDirection estimate_gradient(const ComplexMatrix& a, const GroupElement& g,
                               const EstimatorConfig& config);

/// Constant-step descent driven by estimate_gradient (probe seeds split per
/// iteration). Report rows are exact dense evaluations of the iterates, so the
/// certificate is the exact duality bound; this is meant for desk-scale runs.
OptimizationReport minimize_condition_stochastic(const ComplexMatrix& a, const OptimizerConfig& config,
                                                 const EstimatorConfig& estimator);

}  // namespace geoprec
