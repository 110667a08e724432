#pragma once

#include <map>
#include <utility>
#include <vector>

#include "geoprec/group.hpp"
#include "geoprec/optimizer.hpp"

namespace geoprec {

using Exponent = std::vector<int>;

/// Graded order: lower total degree first; within a degree, larger powers of
/// earlier variables first (x1^2 before x1 x2 before x2^2).
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

int total_degree(const Exponent& alpha);

/// Sparse polynomial in `nvars` variables. Coefficients that are exactly zero
/// are never stored.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Complex, GrlexLess>;

  Polynomial() = default;
  explicit Polynomial(Index nvars) : nvars_(nvars) {}
  Polynomial(Index nvars, const std::vector<std::pair<Exponent, Complex>>& terms);

  Index nvars() const noexcept { return nvars_; }
  const Terms& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  int degree() const;  // -1 for the zero polynomial

  /// Adds c to the coefficient of x^alpha, dropping the term if it cancels.
  void add_term(const Exponent& alpha, Complex c);
  Complex coefficient(const Exponent& alpha) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial operator*(Complex s) const;
  Polynomial operator*(const Polynomial& other) const;

  Complex evaluate(const Vector& x) const;
  Polynomial derivative(Index k) const;

 private:
  Index nvars_ = 0;
  Terms terms_;
};

/// m polynomials in n variables with degree pattern d, deg(f_i) <= d_i.
class PolynomialSystem {
 public:
  PolynomialSystem() = default;
  /// Throws DegreeViolation (index = polynomial) or DimensionMismatch.
  PolynomialSystem(Index nvars, std::vector<Polynomial> polys, std::vector<int> degrees);
  /// Degree pattern taken from the polynomials (at least 1).
  PolynomialSystem(Index nvars, std::vector<Polynomial> polys);

  Index nvars() const noexcept { return nvars_; }
  Index size() const noexcept { return static_cast<Index>(polys_.size()); }
  const Polynomial& operator[](Index i) const { return polys_[static_cast<std::size_t>(i)]; }
  const std::vector<Polynomial>& polynomials() const noexcept { return polys_; }
  const std::vector<int>& degrees() const noexcept { return degrees_; }
  int max_degree() const;

 private:
  Index nvars_ = 0;
  std::vector<Polynomial> polys_;
  std::vector<int> degrees_;
};

/// Bombieri-Weyl pairing sum_alpha f_alpha conj(g_alpha) alpha! / |alpha|!.
/// Linear in f; homogeneous components of different degree are orthogonal.
Complex bw_inner(const Polynomial& f, const Polynomial& g);
double bw_norm(const Polynomial& f);
double bw_norm_system(const PolynomialSystem& f);

struct EvaluatedPoint {
  Vector xi;
  Vector values;
  DenseMatrix jacobian;  // m x n
};

EvaluatedPoint evaluate_system(const PolynomialSystem& f, const Vector& xi);

enum class LocalNorm { kFrobenius, kOperator };

/// ||f||_W times the chosen norm of pinv(D_xi f). Throws ZeroJacobian.
double local_condition(const PolynomialSystem& f, const Vector& xi, LocalNorm norm);

/// (X f)_i = sum_j X_ij f_j. The degree pattern becomes the max over mixed rows.
PolynomialSystem shuffle(const DenseMatrix& x, const PolynomialSystem& f);

inline constexpr std::size_t kDefaultExpansionCap = 1'000'000;

/// f o Y^-1. Throws ExpansionOverflow once an intermediate product exceeds
/// `cap` terms.
PolynomialSystem change_variables(const DenseMatrix& y, const PolynomialSystem& f,
                                  std::size_t cap = kDefaultExpansionCap);

/// G_ij = <f_i, f_j>.
DenseMatrix gram_matrix(const PolynomialSystem& f);
/// Hermitian PSD square root S_f of the Gram matrix, so ||X S_f||_F = ||X f||_W.
DenseMatrix gram_sqrt(const PolynomialSystem& f);

/// (Pi(H) f)_i = sum_j H1_ij f_j - sum_{k,l} H2_kl x_l d_k f_i.
PolynomialSystem lie_derivative(const PolynomialSystem& f, const DenseMatrix& h1, const DenseMatrix& h2);

/// Minimizes mu_F(X f, xi) over the left scheme through the cross condition of
/// (S_f, pinv(D_xi f)). Exact when D_xi f has full row rank.
std::pair<GroupElement, OptimizationReport> precondition_shuffle(const PolynomialSystem& f,
                                                                 const Vector& xi,
                                                                 const OptimizerConfig& config);

/// Weight data of the joint shuffle and change-of-variables action:
/// N = D + 2, gamma = (D + 2)^(1 - m - n) / (m + n).
WeightData polysys_weight_data(const PolynomialSystem& f);

/// log ||(X,Y) f||_W + log ||pinv(X D_xi f Y^-1)||_F and its gradient.
struct PolysysState {
  double value = 0.0;
  LieDirection grad;
  double grad_norm = 0.0;
  double mu_f = 0.0;
  double mu = 0.0;
};

PolysysState evaluate_polysys(const PolynomialSystem& f, const Vector& xi, const GroupElement& g);

/// Gradient descent on the joint action with step (D+2)^-1 (or config.step_size),
/// halving on increase.
std::pair<GroupElement, OptimizationReport> precondition_full(const PolynomialSystem& f,
                                                              const Vector& xi,
                                                              const OptimizerConfig& config);

struct TorusPoint {
  RealVector t;
};

/// Coefficient c_alpha -> c_alpha t^alpha, i.e. x -> t .* x. Support is preserved.
PolynomialSystem torus_action(const RealVector& t, const PolynomialSystem& f);

/// h(t) = log sum_i prod_k (|xi_k| / t_k)^(omega_ik), omega_i = n e_i - 1.
/// Throws ZeroCoordinate.
double h_xi(const Vector& xi, const RealVector& t);
/// Gradient of h with respect to log t.
RealVector h_xi_log_gradient(const Vector& xi, const RealVector& t);

/// mu_F(X (t f), xi / t) + h(t). The rescaled system has xi / t as a root
/// whenever f has xi as a root.
double torus_objective(const PolynomialSystem& f, const Vector& xi, const GroupElement& x,
                       const TorusPoint& t);

struct TorusGradient {
  double value = 0.0;
  LieDirection x_grad;  // left component only
  RealVector log_t_grad;
};

TorusGradient torus_gradient(const PolynomialSystem& f, const Vector& xi, const GroupElement& x,
                             const TorusPoint& t);

struct SparsePreconditioner {
  GroupElement x;
  TorusPoint t;
  OptimizationReport report;
};

/// Joint descent on (X, log t) with base step config.step_size or 1/8, halving
/// on increase. Stops when the gradient norm falls below grad_tol_override
/// (default target_eps) or the step underflows.
SparsePreconditioner precondition_sparse(const PolynomialSystem& f, const Vector& xi,
                                         const OptimizerConfig& config);

}  // namespace geoprec
