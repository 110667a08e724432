#include "geoprec/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "geoprec/errors.hpp"
#include "geoprec/rng.hpp"

namespace geoprec {

ComplexMatrix::ComplexMatrix(DenseMatrix dense)
    : rows_(dense.rows()), cols_(dense.cols()), storage_(std::move(dense)) {}

ComplexMatrix ComplexMatrix::sparse(Index rows, Index cols, std::vector<Triplet> entries) {
  if (rows <= 0 || cols <= 0)
    throw Error(ErrorCode::kDimensionMismatch, "sparse matrix needs positive dimensions");
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& t = entries[k];
    if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
      throw Error(ErrorCode::kDimensionMismatch, "sparse index out of bounds", k);
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  std::vector<Triplet> merged;
  merged.reserve(entries.size());
  for (const auto& t : entries) {
    if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
      merged.back().value += t.value;
    else
      merged.push_back(t);
  }

  ComplexMatrix out;
  out.rows_ = rows;
  out.cols_ = cols;
  std::vector<Eigen::Triplet<Complex>> eigen_triplets;
  eigen_triplets.reserve(merged.size());
  for (const auto& t : merged) eigen_triplets.emplace_back(t.row, t.col, t.value);
  out.compiled_.resize(rows, cols);
  out.compiled_.setFromTriplets(eigen_triplets.begin(), eigen_triplets.end());
  out.compiled_.makeCompressed();
  out.storage_ = std::move(merged);
  return out;
}

ComplexMatrix ComplexMatrix::identity(Index n) {
  return ComplexMatrix(DenseMatrix::Identity(n, n));
}

ComplexMatrix ComplexMatrix::from_real(const Eigen::MatrixXd& real) {
  return ComplexMatrix(DenseMatrix(real.cast<Complex>()));
}

DenseMatrix ComplexMatrix::to_dense() const {
  if (const auto* dense = std::get_if<DenseMatrix>(&storage_)) return *dense;
  return DenseMatrix(compiled_);
}

SparseMatrix ComplexMatrix::to_sparse() const {
  if (is_sparse()) return compiled_;
  return std::get<DenseMatrix>(storage_).sparseView();
}

std::vector<Triplet> ComplexMatrix::triplets() const {
  if (const auto* entries = std::get_if<std::vector<Triplet>>(&storage_)) return *entries;
  const auto& dense = std::get<DenseMatrix>(storage_);
  std::vector<Triplet> out;
  for (Index i = 0; i < rows_; ++i)
    for (Index j = 0; j < cols_; ++j)
      if (dense(i, j) != Complex(0.0)) out.push_back({i, j, dense(i, j)});
  return out;
}

Vector ComplexMatrix::multiply(const Vector& v) const {
  if (v.size() != cols_) throw Error(ErrorCode::kDimensionMismatch, "matvec size");
  if (is_sparse()) return compiled_ * v;
  return std::get<DenseMatrix>(storage_) * v;
}

Vector ComplexMatrix::adjoint_multiply(const Vector& v) const {
  if (v.size() != rows_) throw Error(ErrorCode::kDimensionMismatch, "adjoint matvec size");
  if (is_sparse()) return compiled_.adjoint() * v;
  return std::get<DenseMatrix>(storage_).adjoint() * v;
}

RealVector ComplexMatrix::abs_row_sums() const {
  RealVector sums = RealVector::Zero(rows_);
  if (is_sparse()) {
    for (const auto& t : std::get<std::vector<Triplet>>(storage_)) sums(t.row) += std::abs(t.value);
  } else {
    sums = std::get<DenseMatrix>(storage_).cwiseAbs().rowwise().sum();
  }
  return sums;
}

RealVector ComplexMatrix::abs_col_sums() const {
  RealVector sums = RealVector::Zero(cols_);
  if (is_sparse()) {
    for (const auto& t : std::get<std::vector<Triplet>>(storage_)) sums(t.col) += std::abs(t.value);
  } else {
    sums = std::get<DenseMatrix>(storage_).cwiseAbs().colwise().sum().transpose();
  }
  return sums;
}

bool ComplexMatrix::is_zero() const {
  if (is_sparse()) {
    const auto& entries = std::get<std::vector<Triplet>>(storage_);
    return std::all_of(entries.begin(), entries.end(),
                       [](const Triplet& t) { return t.value == Complex(0.0); });
  }
  return std::get<DenseMatrix>(storage_).isZero(0.0);
}

Index SvdFactorization::rank() const {
  Index r = 0;
  for (Index i = 0; i < singular_values.size(); ++i)
    if (singular_values(i) > rank_tolerance) ++r;
  return r;
}

double SvdFactorization::min_nonzero_singular() const {
  const Index r = rank();
  return r == 0 ? 0.0 : singular_values(r - 1);
}

SvdFactorization svd(const DenseMatrix& a, std::optional<double> rcond) {
  SvdFactorization out;
  Eigen::BDCSVD<DenseMatrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  out.left_vectors = solver.matrixU();
  out.singular_values = solver.singularValues();
  out.right_vectors = solver.matrixV();
  const double eps = std::numeric_limits<double>::epsilon();
  const double rc = rcond.value_or(static_cast<double>(std::max(a.rows(), a.cols())) * eps);
  out.rank_tolerance = rc * out.max_singular();
  return out;
}

double frobenius_norm(const ComplexMatrix& a) {
  if (a.is_sparse()) {
    double sum = 0.0;
    for (const auto& t : a.triplets()) sum += std::norm(t.value);
    return std::sqrt(sum);
  }
  return a.to_dense().norm();
}

DenseMatrix pseudoinverse(const SvdFactorization& f) {
  const Index r = f.rank();
  if (r == 0) throw Error(ErrorCode::kZeroMatrix, "pseudoinverse of zero matrix");
  RealVector inv = f.singular_values.head(r).cwiseInverse();
  return f.right_vectors.leftCols(r) * inv.cast<Complex>().asDiagonal() *
         f.left_vectors.leftCols(r).adjoint();
}

DenseMatrix pseudoinverse(const ComplexMatrix& a, std::optional<double> rcond) {
  if (a.is_zero()) throw Error(ErrorCode::kZeroMatrix, "pseudoinverse of zero matrix");
  return pseudoinverse(svd(a.to_dense(), rcond));
}

double condition_frobenius(const ComplexMatrix& a) {
  if (a.is_zero()) throw Error(ErrorCode::kZeroMatrix, "condition number of zero matrix");
  const auto factors = svd(a.to_dense());
  const Index r = factors.rank();
  const RealVector s = factors.singular_values.head(r);
  return s.norm() * s.cwiseInverse().norm();
}

double condition_euclidean(const ComplexMatrix& a) {
  if (a.is_zero()) throw Error(ErrorCode::kZeroMatrix, "condition number of zero matrix");
  const auto factors = svd(a.to_dense());
  return factors.max_singular() / factors.min_nonzero_singular();
}

double condition_skeel(const ComplexMatrix& a) {
  if (a.is_zero()) throw Error(ErrorCode::kZeroMatrix, "condition number of zero matrix");
  const DenseMatrix dense = a.to_dense();
  const Eigen::MatrixXd abs_pinv = pseudoinverse(a).cwiseAbs();
  const Eigen::MatrixXd product = abs_pinv * dense.cwiseAbs();
  return product.rowwise().sum().maxCoeff();
}

double condition_cross(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.is_zero() || b.is_zero())
    throw Error(ErrorCode::kZeroMatrix, "cross condition number of zero matrix");
  return frobenius_norm(a) * frobenius_norm(b);
}

DenseMatrix random_unitary(Index n, Rng& rng) {
  const DenseMatrix g = rng.complex_gaussian(n, n);
  Eigen::HouseholderQR<DenseMatrix> qr(g);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n, n);
  const DenseMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

}  // namespace geoprec
