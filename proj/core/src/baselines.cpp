#include "geoprec/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "geoprec/errors.hpp"

namespace geoprec {

DenseMatrix jacobi_precondition(const ComplexMatrix& a, JacobiMode mode) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::kDimensionMismatch, "Jacobi preconditioning needs a square matrix");
  DenseMatrix out = a.to_dense();
  const Index n = out.rows();
  Vector d = out.diagonal();
  for (Index i = 0; i < n; ++i)
    if (d(i) == Complex(0.0))
      throw Error(ErrorCode::kZeroDiagonalEntry, "zero diagonal entry", static_cast<std::size_t>(i));

  if (mode == JacobiMode::kLeft) {
    for (Index i = 0; i < n; ++i) out.row(i) /= d(i);
    return out;
  }
  const Vector s = d.cwiseSqrt();
  for (Index i = 0; i < n; ++i) out.row(i) /= s(i);
  for (Index j = 0; j < n; ++j) out.col(j) /= s(j);
  return out;
}

SinkhornResult sinkhorn_equilibrate(const ComplexMatrix& a, int max_iters, double tol) {
  const Index m = a.rows();
  const Index n = a.cols();
  const RealVector rs = a.abs_row_sums();
  const RealVector cs = a.abs_col_sums();
  for (Index i = 0; i < m; ++i)
    if (rs(i) == 0.0) throw Error(ErrorCode::kZeroRowOrColumn, "zero row", static_cast<std::size_t>(i));
  for (Index j = 0; j < n; ++j)
    if (cs(j) == 0.0)
      throw Error(ErrorCode::kZeroRowOrColumn, "zero column", static_cast<std::size_t>(m + j));

  const Eigen::MatrixXd abs_a = a.to_dense().cwiseAbs();
  const double col_target = static_cast<double>(m) / static_cast<double>(n);

  // r scales rows, c scales columns: B = diag(r) |A| diag(c).
  RealVector r = RealVector::Ones(m);
  RealVector c = RealVector::Ones(n);
  SinkhornResult result;

  auto spread = [](const RealVector& v) {
    const double hi = v.maxCoeff();
    const double lo = v.minCoeff();
    return (hi - lo) / hi;
  };

  for (int it = 0; it <= max_iters; ++it) {
    const Eigen::MatrixXd b = r.asDiagonal() * abs_a * c.asDiagonal();
    const RealVector row_sums = b.rowwise().sum();
    const RealVector col_sums = b.colwise().sum().transpose();
    result.residual = std::max(spread(row_sums), spread(col_sums));
    result.iterations = it;
    if (result.residual <= tol) {
      result.converged = true;
      break;
    }
    if (it == max_iters) break;
    r = r.cwiseQuotient(row_sums);
    const RealVector new_cols = (r.asDiagonal() * abs_a * c.asDiagonal()).colwise().sum().transpose();
    c = c.cwiseProduct(RealVector::Constant(n, col_target).cwiseQuotient(new_cols));
  }

  // The pair is determined up to a common scalar; pin x(0) = 1.
  const double pin = r(0);
  result.x = r / pin;
  result.y = (c * pin).cwiseInverse();
  return result;
}

RealVector row_balance(const ComplexMatrix& a) {
  const DenseMatrix dense = a.to_dense();
  RealVector x(dense.rows());
  for (Index i = 0; i < dense.rows(); ++i) {
    const double norm = dense.row(i).norm();
    if (norm == 0.0) throw Error(ErrorCode::kZeroRowOrColumn, "zero row", static_cast<std::size_t>(i));
    x(i) = 1.0 / norm;
  }
  return x;
}

DenseMatrix scale_diagonal(const ComplexMatrix& a, const RealVector& x, const RealVector& y) {
  if (x.size() != a.rows() || y.size() != a.cols())
    throw Error(ErrorCode::kDimensionMismatch, "scaling vector sizes");
  return x.cast<Complex>().asDiagonal() * a.to_dense() * y.cwiseInverse().cast<Complex>().asDiagonal();
}

}  // namespace geoprec
