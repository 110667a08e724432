#pragma once

#include "geoprec/matrix.hpp"

namespace geoprec {

// Heuristic diagonal preconditioners used as comparison baselines.

enum class JacobiMode { kLeft, kTwoSided };

/// left: diag(A)^-1 A.  two-sided: diag(A)^-1/2 A diag(A)^-1/2 (principal
/// square root for complex diagonals). Throws ZeroDiagonalEntry.
DenseMatrix jacobi_precondition(const ComplexMatrix& a, JacobiMode mode);

struct SinkhornResult {
  RealVector x;  // left scaling, x(0) == 1
  RealVector y;  // right scaling; the equilibrated matrix is diag(x) |A| diag(y)^-1
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // max relative spread of row and column sums
};

/// Sinkhorn-Knopp equilibration of |A|: alternately normalizes row sums to 1
/// and column sums to m/n until both are constant to `tol` (relative).
/// Throws ZeroRowOrColumn; columns are reported with index rows + j.
SinkhornResult sinkhorn_equilibrate(const ComplexMatrix& a, int max_iters, double tol);

/// Left diagonal X so every row of XA has unit l2 norm. Throws ZeroRowOrColumn.
RealVector row_balance(const ComplexMatrix& a);

/// Applies diagonal scalings: diag(x) A diag(y)^-1.
DenseMatrix scale_diagonal(const ComplexMatrix& a, const RealVector& x, const RealVector& y);

}  // namespace geoprec
