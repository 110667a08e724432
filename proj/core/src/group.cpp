#include "geoprec/group.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoprec/errors.hpp"
#include "geoprec/rng.hpp"

namespace geoprec {

BlockPartition::BlockPartition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  offsets_.reserve(sizes_.size());
  for (Index s : sizes_) {
    if (s <= 0) throw Error(ErrorCode::kInvalidArgument, "block sizes must be positive");
    offsets_.push_back(dimension_);
    dimension_ += s;
    max_block_ = std::max(max_block_, s);
  }
}

BlockPartition BlockPartition::diagonal(Index n) {
  return BlockPartition(std::vector<Index>(static_cast<std::size_t>(n), 1));
}

BlockPartition BlockPartition::full(Index n) { return BlockPartition(std::vector<Index>{n}); }

BlockPartition BlockPartition::uniform(Index n, Index k) {
  if (k <= 0) throw Error(ErrorCode::kInvalidArgument, "block size must be positive");
  if (n <= k) return full(n);
  std::vector<Index> sizes(static_cast<std::size_t>(n / k), k);
  sizes.back() += n % k;
  return BlockPartition(std::move(sizes));
}

std::size_t BlockPartition::block_of(Index i) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  return static_cast<std::size_t>(std::distance(offsets_.begin(), it) - 1);
}

GroupScheme GroupScheme::make(Side side, BlockPartition left, BlockPartition right) {
  GroupScheme s;
  s.side = side;
  s.left = std::move(left);
  s.right = std::move(right);
  return s;
}

GroupScheme GroupScheme::diagonal(Side side, Index m, Index n) {
  return make(side, BlockPartition::diagonal(m), BlockPartition::diagonal(n));
}

GroupScheme GroupScheme::block(Side side, Index m, Index n, Index block_size) {
  return make(side, BlockPartition::uniform(m, block_size), BlockPartition::uniform(n, block_size));
}

GroupScheme GroupScheme::full(Side side, Index m, Index n) {
  return make(side, BlockPartition::full(m), BlockPartition::full(n));
}

LieDirection LieDirection::zero(const GroupScheme& scheme) {
  return {DenseMatrix::Zero(scheme.m(), scheme.m()), DenseMatrix::Zero(scheme.n(), scheme.n())};
}

double inner(const LieDirection& a, const LieDirection& b) {
  return (a.h1.adjoint() * b.h1).trace().real() + (a.h2.adjoint() * b.h2).trace().real();
}

double norm(const LieDirection& a) { return std::sqrt(a.h1.squaredNorm() + a.h2.squaredNorm()); }

GroupElement GroupElement::identity(const GroupScheme& scheme) {
  return {scheme, DenseMatrix::Identity(scheme.m(), scheme.m()),
          DenseMatrix::Identity(scheme.n(), scheme.n())};
}

namespace {

DenseMatrix project_blocks(const BlockPartition& p, const DenseMatrix& m) {
  DenseMatrix out = DenseMatrix::Zero(p.dimension(), p.dimension());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const Index o = p.offset(b);
    const Index s = p.size(b);
    const DenseMatrix blk = m.block(o, o, s, s);
    out.block(o, o, s, s) = 0.5 * (blk + blk.adjoint());
  }
  return out;
}

// Applies f to the eigenvalues of each Hermitian block.
template <typename F>
DenseMatrix block_spectral(const BlockPartition& p, const DenseMatrix& h, F f) {
  DenseMatrix out = DenseMatrix::Zero(p.dimension(), p.dimension());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const Index o = p.offset(b);
    const Index s = p.size(b);
    if (s == 1) {
      out(o, o) = f(h(o, o).real(), b);
      continue;
    }
    const DenseMatrix blk = 0.5 * (h.block(o, o, s, s) + h.block(o, o, s, s).adjoint());
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(blk);
    RealVector mapped(s);
    for (Index i = 0; i < s; ++i) mapped(i) = f(eig.eigenvalues()(i), b);
    out.block(o, o, s, s) =
        eig.eigenvectors() * mapped.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
  }
  return out;
}

// x * m for block-diagonal x.
DenseMatrix block_left_multiply(const BlockPartition& p, const DenseMatrix& x, const DenseMatrix& m) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const Index o = p.offset(b);
    const Index s = p.size(b);
    out.middleRows(o, s).noalias() = x.block(o, o, s, s) * m.middleRows(o, s);
  }
  return out;
}

// m * x for block-diagonal x.
DenseMatrix block_right_multiply(const DenseMatrix& m, const BlockPartition& p, const DenseMatrix& x) {
  DenseMatrix out(m.rows(), m.cols());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const Index o = p.offset(b);
    const Index s = p.size(b);
    out.middleCols(o, s).noalias() = m.middleCols(o, s) * x.block(o, o, s, s);
  }
  return out;
}

void check_dims(const GroupScheme& scheme, const LieDirection& h) {
  if (h.h1.rows() != scheme.m() || h.h1.cols() != scheme.m() || h.h2.rows() != scheme.n() ||
      h.h2.cols() != scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "direction does not match scheme");
}

}  // namespace

LieDirection project_to_lie(const GroupScheme& scheme, const DenseMatrix& m1, const DenseMatrix& m2) {
  if (m1.rows() != scheme.m() || m1.cols() != scheme.m())
    throw Error(ErrorCode::kDimensionMismatch, "left component does not match scheme");
  LieDirection out;
  out.h1 = project_blocks(scheme.left, m1);
  if (scheme.two_sided()) {
    if (m2.rows() != scheme.n() || m2.cols() != scheme.n())
      throw Error(ErrorCode::kDimensionMismatch, "right component does not match scheme");
    out.h2 = project_blocks(scheme.right, m2);
  } else {
    out.h2 = DenseMatrix::Zero(scheme.n(), scheme.n());
  }
  return out;
}

DenseMatrix hermitian_block_exp(const BlockPartition& partition, const DenseMatrix& h, double step) {
  return block_spectral(partition, h, [step](double lambda, std::size_t) {
    return std::exp(step * lambda);
  });
}

DenseMatrix block_inverse(const BlockPartition& p, const DenseMatrix& x) {
  DenseMatrix out = DenseMatrix::Zero(p.dimension(), p.dimension());
  for (std::size_t b = 0; b < p.num_blocks(); ++b) {
    const Index o = p.offset(b);
    const Index s = p.size(b);
    if (s == 1) {
      if (x(o, o) == Complex(0.0))
        throw Error(ErrorCode::kSingularBlock, "singular block", b);
      out(o, o) = 1.0 / x(o, o);
      continue;
    }
    Eigen::FullPivLU<DenseMatrix> lu(x.block(o, o, s, s));
    if (!lu.isInvertible()) throw Error(ErrorCode::kSingularBlock, "singular block", b);
    out.block(o, o, s, s) = lu.inverse();
  }
  return out;
}

GroupElement exp_action(const GroupElement& g, const LieDirection& h, double step) {
  check_dims(g.scheme, h);
  GroupElement out = g;
  out.x = block_left_multiply(g.scheme.left, hermitian_block_exp(g.scheme.left, h.h1, step), g.x);
  if (g.scheme.two_sided())
    out.y = block_left_multiply(g.scheme.right, hermitian_block_exp(g.scheme.right, h.h2, step), g.y);
  return repolarize(out);
}

DenseMatrix apply(const GroupElement& g, const DenseMatrix& a) {
  if (a.rows() != g.scheme.m() || a.cols() != g.scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "matrix does not match scheme");
  const DenseMatrix xa = block_left_multiply(g.scheme.left, g.x, a);
  if (!g.scheme.two_sided()) return xa;
  return block_right_multiply(xa, g.scheme.right, block_inverse(g.scheme.right, g.y));
}

ComplexMatrix apply(const GroupElement& g, const ComplexMatrix& a) {
  if (!a.is_sparse()) return ComplexMatrix(geoprec::apply(g, a.to_dense()));
  if (a.rows() != g.scheme.m() || a.cols() != g.scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "matrix does not match scheme");
  const SparseMatrix x = g.x.sparseView();
  SparseMatrix b = x * a.to_sparse();
  if (g.scheme.two_sided()) {
    const SparseMatrix y_inv = block_inverse(g.scheme.right, g.y).sparseView();
    b = b * y_inv;
  }
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(b.nonZeros()));
  for (Index k = 0; k < b.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(b, k); it; ++it)
      entries.push_back({it.row(), it.col(), it.value()});
  return ComplexMatrix::sparse(b.rows(), b.cols(), std::move(entries));
}

DenseMatrix apply_partner(const GroupElement& g, const DenseMatrix& b) {
  if (b.cols() != g.scheme.m())
    throw Error(ErrorCode::kDimensionMismatch, "partner matrix does not match scheme");
  const DenseMatrix bx = block_right_multiply(b, g.scheme.left, block_inverse(g.scheme.left, g.x));
  if (!g.scheme.two_sided()) return bx;
  if (b.rows() != g.scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "partner matrix does not match scheme");
  return block_left_multiply(g.scheme.right, g.y, bx);
}

GroupElement repolarize(const GroupElement& g) {
  // K g depends only on the positive factor P in X = U P, i.e. P = (X* X)^{1/2}.
  auto polar = [](const BlockPartition& p, const DenseMatrix& x) {
    const DenseMatrix gram = block_left_multiply(p, x.adjoint(), x);
    const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
    return block_spectral(p, gram, [scale](double lambda, std::size_t b) {
      if (!(lambda > 1e-28 * scale)) throw Error(ErrorCode::kSingularBlock, "singular block", b);
      return std::sqrt(lambda);
    });
  };
  GroupElement out = g;
  out.x = polar(g.scheme.left, g.x);
  if (g.scheme.two_sided()) out.y = polar(g.scheme.right, g.y);
  return out;
}

WeightData weight_data(const GroupScheme& scheme) {
  const double m = static_cast<double>(scheme.m());
  if (!scheme.two_sided()) return {std::sqrt(2.0), std::pow(m, -1.5)};
  const double n = static_cast<double>(scheme.n());
  return {2.0, std::pow(m + n, -1.5)};
}

LieDirection random_direction(const GroupScheme& scheme, Rng& rng) {
  const DenseMatrix m1 = rng.complex_gaussian(scheme.m(), scheme.m());
  const DenseMatrix m2 = rng.complex_gaussian(scheme.n(), scheme.n());
  return project_to_lie(scheme, m1, m2);
}

}  // namespace geoprec
