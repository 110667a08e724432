#include <algorithm>
#include <cmath>
#include <numeric>

#include "geoprec/errors.hpp"
#include "geoprec/polysys.hpp"

namespace geoprec {

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

int total_degree(const Exponent& alpha) { return std::accumulate(alpha.begin(), alpha.end(), 0); }

Polynomial::Polynomial(Index nvars, const std::vector<std::pair<Exponent, Complex>>& terms)
    : nvars_(nvars) {
  for (const auto& [alpha, c] : terms) add_term(alpha, c);
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return total_degree(terms_.rbegin()->first);
}

void Polynomial::add_term(const Exponent& alpha, Complex c) {
  if (static_cast<Index>(alpha.size()) != nvars_)
    throw Error(ErrorCode::kDimensionMismatch, "exponent length differs from variable count");
  if (std::any_of(alpha.begin(), alpha.end(), [](int e) { return e < 0; }))
    throw Error(ErrorCode::kInvalidArgument, "negative exponent");
  if (c == Complex(0.0)) return;
  auto [it, inserted] = terms_.try_emplace(alpha, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0.0)) terms_.erase(it);
  }
}

Complex Polynomial::coefficient(const Exponent& alpha) const {
  const auto it = terms_.find(alpha);
  return it == terms_.end() ? Complex(0.0) : it->second;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.nvars_ != nvars_) throw Error(ErrorCode::kDimensionMismatch, "variable count");
  for (const auto& [alpha, c] : other.terms_) add_term(alpha, c);
  return *this;
}

Polynomial Polynomial::operator*(Complex s) const {
  Polynomial out(nvars_);
  if (s == Complex(0.0)) return out;
  for (const auto& [alpha, c] : terms_) out.add_term(alpha, c * s);
  return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (other.nvars_ != nvars_) throw Error(ErrorCode::kDimensionMismatch, "variable count");
  Polynomial out(nvars_);
  Exponent sum(static_cast<std::size_t>(nvars_));
  for (const auto& [a, ca] : terms_)
    for (const auto& [b, cb] : other.terms_) {
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = a[k] + b[k];
      out.add_term(sum, ca * cb);
    }
  return out;
}

Complex Polynomial::evaluate(const Vector& x) const {
  if (x.size() != nvars_) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  Complex total = 0.0;
  for (const auto& [alpha, c] : terms_) {
    Complex mono = c;
    for (Index k = 0; k < nvars_; ++k)
      for (int e = 0; e < alpha[static_cast<std::size_t>(k)]; ++e) mono *= x(k);
    total += mono;
  }
  return total;
}

Polynomial Polynomial::derivative(Index k) const {
  Polynomial out(nvars_);
  const auto kk = static_cast<std::size_t>(k);
  for (const auto& [alpha, c] : terms_) {
    if (alpha[kk] == 0) continue;
    Exponent beta = alpha;
    beta[kk] -= 1;
    out.add_term(beta, c * static_cast<double>(alpha[kk]));
  }
  return out;
}

PolynomialSystem::PolynomialSystem(Index nvars, std::vector<Polynomial> polys, std::vector<int> degrees)
    : nvars_(nvars), polys_(std::move(polys)), degrees_(std::move(degrees)) {
  if (nvars_ < 1) throw Error(ErrorCode::kInvalidArgument, "a system needs at least one variable");
  if (degrees_.size() != polys_.size())
    throw Error(ErrorCode::kDimensionMismatch, "degree pattern length differs from system size");
  for (std::size_t i = 0; i < polys_.size(); ++i) {
    if (polys_[i].nvars() != nvars_)
      throw Error(ErrorCode::kDimensionMismatch, "polynomial variable count", i);
    if (degrees_[i] < 0 || polys_[i].degree() > degrees_[i])
      throw Error(ErrorCode::kDegreeViolation, "polynomial exceeds its declared degree", i);
  }
}

PolynomialSystem::PolynomialSystem(Index nvars, std::vector<Polynomial> polys)
    : PolynomialSystem(nvars, polys, [&] {
        std::vector<int> d;
        for (const auto& p : polys) d.push_back(std::max(1, p.degree()));
        return d;
      }()) {}

int PolynomialSystem::max_degree() const {
  return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

namespace {

double bw_weight(const Exponent& alpha) {
  double lw = -std::lgamma(static_cast<double>(total_degree(alpha)) + 1.0);
  for (int e : alpha) lw += std::lgamma(static_cast<double>(e) + 1.0);
  return std::exp(lw);
}

}  // namespace

Complex bw_inner(const Polynomial& f, const Polynomial& g) {
  if (f.nvars() != g.nvars()) throw Error(ErrorCode::kDimensionMismatch, "variable count");
  Complex total = 0.0;
  for (const auto& [alpha, c] : f.terms()) {
    const Complex d = g.coefficient(alpha);
    if (d != Complex(0.0)) total += c * std::conj(d) * bw_weight(alpha);
  }
  return total;
}

double bw_norm(const Polynomial& f) {
  double total = 0.0;
  for (const auto& [alpha, c] : f.terms()) total += std::norm(c) * bw_weight(alpha);
  return std::sqrt(total);
}

double bw_norm_system(const PolynomialSystem& f) {
  double total = 0.0;
  for (const auto& p : f.polynomials()) total += std::pow(bw_norm(p), 2);
  return std::sqrt(total);
}

EvaluatedPoint evaluate_system(const PolynomialSystem& f, const Vector& xi) {
  if (xi.size() != f.nvars()) throw Error(ErrorCode::kDimensionMismatch, "point dimension");
  EvaluatedPoint out;
  out.xi = xi;
  out.values.resize(f.size());
  out.jacobian.resize(f.size(), f.nvars());
  for (Index i = 0; i < f.size(); ++i) {
    out.values(i) = f[i].evaluate(xi);
    for (Index k = 0; k < f.nvars(); ++k) out.jacobian(i, k) = f[i].derivative(k).evaluate(xi);
  }
  return out;
}

double local_condition(const PolynomialSystem& f, const Vector& xi, LocalNorm norm) {
  const DenseMatrix jac = evaluate_system(f, xi).jacobian;
  if (jac.isZero(0.0)) throw Error(ErrorCode::kZeroJacobian, "Jacobian vanishes at the point");
  const auto factors = svd(jac);
  const double pinv_norm = norm == LocalNorm::kOperator ? 1.0 / factors.min_nonzero_singular()
                                                        : pseudoinverse(factors).norm();
  return bw_norm_system(f) * pinv_norm;
}

PolynomialSystem shuffle(const DenseMatrix& x, const PolynomialSystem& f) {
  if (x.rows() != f.size() || x.cols() != f.size())
    throw Error(ErrorCode::kDimensionMismatch, "shuffle matrix does not match system size");
  std::vector<Polynomial> out;
  std::vector<int> degrees;
  for (Index i = 0; i < f.size(); ++i) {
    Polynomial g(f.nvars());
    int d = 0;
    for (Index j = 0; j < f.size(); ++j) {
      if (x(i, j) == Complex(0.0)) continue;
      g += f[j] * x(i, j);
      d = std::max(d, f.degrees()[static_cast<std::size_t>(j)]);
    }
    out.push_back(std::move(g));
    degrees.push_back(std::max(d, 1));
  }
  return PolynomialSystem(f.nvars(), std::move(out), std::move(degrees));
}

PolynomialSystem change_variables(const DenseMatrix& y, const PolynomialSystem& f, std::size_t cap) {
  const Index n = f.nvars();
  if (y.rows() != n || y.cols() != n)
    throw Error(ErrorCode::kDimensionMismatch, "change of variables does not match variable count");
  Eigen::FullPivLU<DenseMatrix> lu(y);
  if (!lu.isInvertible()) throw Error(ErrorCode::kSingularBlock, "change of variables is singular");
  const DenseMatrix w = lu.inverse();

  // Linear forms (W x)_k and their powers, cached per variable.
  std::vector<std::vector<Polynomial>> powers(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) {
    Polynomial lin(n);
    for (Index l = 0; l < n; ++l) {
      Exponent e(static_cast<std::size_t>(n), 0);
      e[static_cast<std::size_t>(l)] = 1;
      lin.add_term(e, w(k, l));
    }
    Polynomial one(n);
    one.add_term(Exponent(static_cast<std::size_t>(n), 0), 1.0);
    powers[static_cast<std::size_t>(k)] = {one, lin};
  }
  auto power = [&](Index k, int e) -> const Polynomial& {
    auto& cache = powers[static_cast<std::size_t>(k)];
    while (static_cast<int>(cache.size()) <= e) {
      cache.push_back(cache.back() * cache[1]);
      if (cache.back().terms().size() > cap)
        throw Error(ErrorCode::kExpansionOverflow, "expanded polynomial exceeds the term cap");
    }
    return cache[static_cast<std::size_t>(e)];
  };

  std::vector<Polynomial> out;
  for (Index i = 0; i < f.size(); ++i) {
    Polynomial g(n);
    for (const auto& [alpha, c] : f[i].terms()) {
      Polynomial mono(n);
      mono.add_term(Exponent(static_cast<std::size_t>(n), 0), c);
      for (Index k = 0; k < n; ++k) {
        const int e = alpha[static_cast<std::size_t>(k)];
        if (e == 0) continue;
        mono = mono * power(k, e);
        if (mono.terms().size() > cap)
          throw Error(ErrorCode::kExpansionOverflow, "expanded polynomial exceeds the term cap");
      }
      g += mono;
      if (g.terms().size() > cap)
        throw Error(ErrorCode::kExpansionOverflow, "expanded polynomial exceeds the term cap");
    }
    out.push_back(std::move(g));
  }
  return PolynomialSystem(n, std::move(out), f.degrees());
}

DenseMatrix gram_matrix(const PolynomialSystem& f) {
  const Index m = f.size();
  DenseMatrix g(m, m);
  for (Index i = 0; i < m; ++i)
    for (Index j = i; j < m; ++j) {
      g(i, j) = bw_inner(f[i], f[j]);
      g(j, i) = std::conj(g(i, j));
    }
  return g;
}

DenseMatrix gram_sqrt(const PolynomialSystem& f) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(gram_matrix(f));
  const RealVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
}

PolynomialSystem lie_derivative(const PolynomialSystem& f, const DenseMatrix& h1, const DenseMatrix& h2) {
  const Index m = f.size();
  const Index n = f.nvars();
  if (h1.rows() != m || h1.cols() != m || h2.rows() != n || h2.cols() != n)
    throw Error(ErrorCode::kDimensionMismatch, "direction does not match system");
  std::vector<Polynomial> out;
  for (Index i = 0; i < m; ++i) {
    Polynomial g(n);
    for (Index j = 0; j < m; ++j)
      if (h1(i, j) != Complex(0.0)) g += f[j] * h1(i, j);
    for (Index k = 0; k < n; ++k) {
      const Polynomial dk = f[i].derivative(k);
      if (dk.is_zero()) continue;
      for (Index l = 0; l < n; ++l) {
        if (h2(k, l) == Complex(0.0)) continue;
        // x_l * d_k f_i, scaled by -H2_kl.
        Polynomial shifted(n);
        for (const auto& [alpha, c] : dk.terms()) {
          Exponent beta = alpha;
          beta[static_cast<std::size_t>(l)] += 1;
          shifted.add_term(beta, -h2(k, l) * c);
        }
        g += shifted;
      }
    }
    out.push_back(std::move(g));
  }
  return PolynomialSystem(n, std::move(out), f.degrees());
}

PolynomialSystem torus_action(const RealVector& t, const PolynomialSystem& f) {
  if (t.size() != f.nvars()) throw Error(ErrorCode::kDimensionMismatch, "torus point dimension");
  std::vector<Polynomial> out;
  for (const auto& p : f.polynomials()) {
    Polynomial g(f.nvars());
    for (const auto& [alpha, c] : p.terms()) {
      double scale = 1.0;
      for (Index k = 0; k < t.size(); ++k) scale *= std::pow(t(k), alpha[static_cast<std::size_t>(k)]);
      g.add_term(alpha, c * scale);
    }
    out.push_back(std::move(g));
  }
  return PolynomialSystem(f.nvars(), std::move(out), f.degrees());
}

}  // namespace geoprec
