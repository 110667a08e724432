#pragma once

#include <vector>

#include "geoprec/matrix.hpp"

namespace geoprec {

/// Contiguous, ordered partition of {0..n-1}. Block size 1 everywhere gives the
/// diagonal torus; a single block gives the full general linear group.
class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<Index> sizes);

  static BlockPartition diagonal(Index n);
  static BlockPartition full(Index n);
  /// Blocks of size k; the final block absorbs the remainder when k does not divide n.
  static BlockPartition uniform(Index n, Index k);

  Index dimension() const noexcept { return dimension_; }
  std::size_t num_blocks() const noexcept { return sizes_.size(); }
  Index size(std::size_t b) const { return sizes_[b]; }
  Index offset(std::size_t b) const { return offsets_[b]; }
  bool is_diagonal() const noexcept { return max_block_ <= 1; }
  Index max_block() const noexcept { return max_block_; }
  // Block index containing coordinate i.
  std::size_t block_of(Index i) const;

  bool operator==(const BlockPartition& other) const { return sizes_ == other.sizes_; }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
  Index dimension_ = 0;
  Index max_block_ = 0;
};

enum class Side { kLeft, kLeftRight };

/// The preconditioner group: block-diagonal X (m x m), and for two-sided
/// schemes block-diagonal Y (n x n). For left-only schemes `right` is the
/// trivial partition and Y stays the identity.
struct GroupScheme {
  Side side = Side::kLeft;
  BlockPartition left;
  BlockPartition right;

  static GroupScheme diagonal(Side side, Index m, Index n);
  static GroupScheme block(Side side, Index m, Index n, Index block_size);
  static GroupScheme full(Side side, Index m, Index n);
  static GroupScheme make(Side side, BlockPartition left, BlockPartition right);

  Index m() const noexcept { return left.dimension(); }
  Index n() const noexcept { return right.dimension(); }
  bool two_sided() const noexcept { return side == Side::kLeftRight; }
  bool operator==(const GroupScheme& other) const {
    return side == other.side && left == other.left && right == other.right;
  }
};

/// Tangent direction (H1, H2), Hermitian and block-diagonal. H2 is identically
/// zero for left-only schemes.
struct LieDirection {
  DenseMatrix h1;
  DenseMatrix h2;

  static LieDirection zero(const GroupScheme& scheme);
  LieDirection operator*(double s) const { return {h1 * s, h2 * s}; }
  LieDirection operator+(const LieDirection& o) const { return {h1 + o.h1, h2 + o.h2}; }
  LieDirection operator-(const LieDirection& o) const { return {h1 - o.h1, h2 - o.h2}; }
};

/// Re tr(H1* K1) + Re tr(H2* K2).
double inner(const LieDirection& a, const LieDirection& b);
double norm(const LieDirection& a);

struct GroupElement {
  GroupScheme scheme;
  DenseMatrix x;
  DenseMatrix y;

  static GroupElement identity(const GroupScheme& scheme);
};

/// Orthogonal projection (Frobenius inner product) of (M1, M2) onto the
/// Hermitian part of the scheme's Lie algebra: keep the block pattern and take
/// (B + B*)/2 blockwise. M2 is ignored for left-only schemes.
LieDirection project_to_lie(const GroupScheme& scheme, const DenseMatrix& m1, const DenseMatrix& m2);

/// (exp(step H1) X, exp(step H2) Y), re-polarized.
GroupElement exp_action(const GroupElement& g, const LieDirection& h, double step);

/// X A Y^-1 (X A for left-only schemes).
DenseMatrix apply(const GroupElement& g, const DenseMatrix& a);
/// Sparse-preserving variant; sparse input yields sparse output.
ComplexMatrix apply(const GroupElement& g, const ComplexMatrix& a);
/// Y B X^-1, the contragredient action used for the partner factor of a cross
/// condition number.
DenseMatrix apply_partner(const GroupElement& g, const DenseMatrix& b);

/// Replaces X and Y by the Hermitian positive definite polar factors
/// (X* X)^{1/2}, (Y* Y)^{1/2}, block by block. X = U P with U unitary, so
/// X A Y^-1 and P_X A P_Y^-1 differ by unitary factors. Throws SingularBlock.
GroupElement repolarize(const GroupElement& g);

/// Blockwise exp of a Hermitian block-diagonal matrix.
DenseMatrix hermitian_block_exp(const BlockPartition& partition, const DenseMatrix& h, double step);
/// Blockwise inverse of a block-diagonal matrix. Throws SingularBlock.
DenseMatrix block_inverse(const BlockPartition& partition, const DenseMatrix& x);

/// Weight norm N and the lower bound on the weight margin gamma of the tensor
/// representation that carries the Frobenius condition number.
struct WeightData {
  double weight_norm = 0.0;
  double weight_margin = 0.0;
};

WeightData weight_data(const GroupScheme& scheme);

/// Random Hermitian direction supported on the scheme's blocks.
LieDirection random_direction(const GroupScheme& scheme, Rng& rng);

}  // namespace geoprec
