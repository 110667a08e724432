#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace geoprec {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;

class Rng;

struct Triplet {
  Index row = 0;
  Index col = 0;
  Complex value;
};

/// A complex matrix held either densely or as canonical coordinate triplets.
///
/// Sparse input is sorted by (row, col) and duplicate coordinates are summed at
/// construction; explicit zeros that result from the summation are kept so the
/// stored pattern matches what the caller supplied. Values are immutable after
/// construction.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  // Implicit on purpose: dense Eigen expressions are the common currency.
  ComplexMatrix(DenseMatrix dense);  // NOLINT(google-explicit-constructor)

  static ComplexMatrix sparse(Index rows, Index cols, std::vector<Triplet> entries);
  static ComplexMatrix identity(Index n);
  static ComplexMatrix from_real(const Eigen::MatrixXd& real);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  bool is_sparse() const noexcept { return std::holds_alternative<std::vector<Triplet>>(storage_); }

  DenseMatrix to_dense() const;
  SparseMatrix to_sparse() const;
  // Nonzero pattern as canonical triplets (dense storage: every nonzero entry).
  std::vector<Triplet> triplets() const;

  Vector multiply(const Vector& v) const;
  Vector adjoint_multiply(const Vector& v) const;

  // Row/column sums of |a_ij|.
  RealVector abs_row_sums() const;
  RealVector abs_col_sums() const;

  bool is_zero() const;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::variant<DenseMatrix, std::vector<Triplet>> storage_;
  SparseMatrix compiled_;  // valid iff sparse storage
};

struct SvdFactorization {
  DenseMatrix left_vectors;      // m x r
  RealVector singular_values;    // nonincreasing, length r = min(m, n)
  DenseMatrix right_vectors;     // n x r
  double rank_tolerance = 0.0;   // values <= tolerance count as zero

  Index rank() const;
  double max_singular() const { return singular_values.size() ? singular_values(0) : 0.0; }
  // Smallest singular value above the rank tolerance.
  double min_nonzero_singular() const;
};

/// Thin SVD. The rank tolerance is rcond * sigma_max with
/// rcond defaulting to max(m, n) * machine epsilon.
SvdFactorization svd(const DenseMatrix& a, std::optional<double> rcond = std::nullopt);

double frobenius_norm(const ComplexMatrix& a);

/// Moore-Penrose pseudoinverse. Throws ZeroMatrix for the zero matrix.
DenseMatrix pseudoinverse(const ComplexMatrix& a, std::optional<double> rcond = std::nullopt);
DenseMatrix pseudoinverse(const SvdFactorization& factors);

double condition_frobenius(const ComplexMatrix& a);
double condition_euclidean(const ComplexMatrix& a);
/// || |A^+| |A| ||_inf, the Skeel condition number.
double condition_skeel(const ComplexMatrix& a);
/// ||A||_F ||B||_F.
double condition_cross(const ComplexMatrix& a, const ComplexMatrix& b);

/// Haar-distributed unitary matrix from the QR factorization of a complex
/// Gaussian matrix (phases of R's diagonal folded into Q).
DenseMatrix random_unitary(Index n, Rng& rng);

}  // namespace geoprec
