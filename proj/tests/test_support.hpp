#pragma once

#include <cmath>
#include <functional>
#include <optional>

#include "geoprec/errors.hpp"
#include "geoprec/group.hpp"
#include "geoprec/matrix.hpp"
#include "geoprec/polysys.hpp"
#include "geoprec/rng.hpp"

namespace geoprec::testing {

/// Code of the geoprec::Error thrown by f, or empty if f returns normally.
template <class F>
std::optional<ErrorCode> error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline DenseMatrix random_matrix(Index m, Index n, Rng& rng, bool complex = true) {
  if (complex) return rng.complex_gaussian(m, n);
  return rng.gaussian(m, n).cast<Complex>();
}

// Hermitian positive definite matrix with eigenvalues log-spaced in [1, cond].
inline DenseMatrix random_spd(Index n, double cond, Rng& rng) {
  const DenseMatrix u = random_unitary(n, rng);
  RealVector ev(n);
  for (Index i = 0; i < n; ++i) ev(i) = std::pow(cond, static_cast<double>(i) / static_cast<double>(n - 1));
  return u * ev.cast<Complex>().asDiagonal() * u.adjoint();
}

// Sparse matrix with a unit diagonal and `per_row` random off-diagonal entries per row.
inline ComplexMatrix random_sparse(Index m, Index n, int per_row, double scale, Rng& rng) {
  std::vector<Triplet> t;
  for (Index i = 0; i < m; ++i) {
    if (i < n) t.push_back({i, i, 1.0});
    for (int k = 0; k < per_row; ++k) {
      const Index j = static_cast<Index>(rng.next() % static_cast<std::uint64_t>(n));
      t.push_back({i, j, scale * rng.normal()});
    }
  }
  return ComplexMatrix::sparse(m, n, std::move(t));
}

enum class SchemeKind { kDiagonal, kBlock, kFull };

inline GroupScheme make_scheme(SchemeKind kind, Side side, Index m, Index n) {
  switch (kind) {
    case SchemeKind::kDiagonal: return GroupScheme::diagonal(side, m, n);
    case SchemeKind::kBlock: return GroupScheme::block(side, m, n, 2);
    case SchemeKind::kFull: return GroupScheme::full(side, m, n);
  }
  return {};
}

/// exp(scale H) acting on the identity for a random H of the scheme.
inline GroupElement random_element(const GroupScheme& scheme, Rng& rng, double scale = 0.3) {
  return exp_action(GroupElement::identity(scheme), random_direction(scheme, rng), scale);
}

/// log kF through the matrix-core SVD, independent of the objective module.
inline double log_kF(const DenseMatrix& a, const GroupElement& g) {
  return std::log(condition_frobenius(geoprec::apply(g, a)));
}

/// Richardson-extrapolated central first derivative of phi at 0.
inline double fd_first(const std::function<double(double)>& phi, double h = 1e-3) {
  auto d = [&](double s) { return (phi(s) - phi(-s)) / (2.0 * s); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

/// Richardson-extrapolated central second derivative of phi at 0.
inline double fd_second(const std::function<double(double)>& phi, double h = 1e-2) {
  const double f0 = phi(0.0);
  auto d = [&](double s) { return (phi(s) - 2.0 * f0 + phi(-s)) / (s * s); };
  return (4.0 * d(h / 2) - d(h)) / 3.0;
}

inline Polynomial random_polynomial(Index nvars, int degree, Rng& rng, double density = 1.0,
                                    bool complex = true) {
  Polynomial p(nvars);
  // Enumerate exponents of total degree <= degree.
  std::function<void(Exponent&, Index, int)> rec = [&](Exponent& e, Index k, int left) {
    if (k == nvars) {
      if (rng.uniform(0.0, 1.0) < density)
        p.add_term(e, complex ? Complex(rng.normal(), rng.normal()) : Complex(rng.normal(), 0.0));
      return;
    }
    for (int d = 0; d <= left; ++d) {
      e[static_cast<std::size_t>(k)] = d;
      rec(e, k + 1, left - d);
    }
    e[static_cast<std::size_t>(k)] = 0;
  };
  Exponent e(static_cast<std::size_t>(nvars), 0);
  rec(e, 0, degree);
  return p;
}

/// Random system of the given degrees, shifted so that xi is a root.
inline PolynomialSystem random_system_with_root(Index nvars, const std::vector<int>& degrees,
                                                const Vector& xi, Rng& rng, double density = 1.0) {
  std::vector<Polynomial> polys;
  for (int d : degrees) {
    Polynomial p = random_polynomial(nvars, d, rng, density);
    p.add_term(Exponent(static_cast<std::size_t>(nvars), 0), -p.evaluate(xi));
    polys.push_back(std::move(p));
  }
  return PolynomialSystem(nvars, std::move(polys), degrees);
}

}  // namespace geoprec::testing
