#include <cmath>
#include <limits>

#include "geoprec/errors.hpp"
#include "geoprec/objective.hpp"
#include "geoprec/polysys.hpp"

namespace geoprec {

namespace {

DenseMatrix nonzero_jacobian(const PolynomialSystem& f, const Vector& xi) {
  DenseMatrix jac = evaluate_system(f, xi).jacobian;
  if (jac.isZero(0.0)) throw Error(ErrorCode::kZeroJacobian, "Jacobian vanishes at the point");
  return jac;
}

// M_kl = sum_i <x_l d_k w_i, w_i>, the pairing of w with every elementary
// generator of the change-of-variables action.
DenseMatrix variable_pairings(const PolynomialSystem& w) {
  const Index n = w.nvars();
  DenseMatrix m = DenseMatrix::Zero(n, n);
  for (const auto& p : w.polynomials())
    for (Index k = 0; k < n; ++k) {
      const Polynomial dk = p.derivative(k);
      for (Index l = 0; l < n; ++l) {
        Polynomial shifted(n);
        for (const auto& [alpha, c] : dk.terms()) {
          Exponent beta = alpha;
          beta[static_cast<std::size_t>(l)] += 1;
          shifted.add_term(beta, c);
        }
        m(k, l) += bw_inner(shifted, p);
      }
    }
  return m;
}

bool step_accepted(double candidate, double current) {
  return candidate <= current + 1e-14 * std::abs(current);
}

constexpr int kMaxHalvings = 40;

}  // namespace

std::pair<GroupElement, OptimizationReport> precondition_shuffle(const PolynomialSystem& f,
                                                                 const Vector& xi,
                                                                 const OptimizerConfig& config) {
  const Index m = f.size();
  if (config.scheme.two_sided() || config.scheme.m() != m)
    throw Error(ErrorCode::kDimensionMismatch, "shuffle preconditioning needs a left scheme of size m");
  const DenseMatrix jac = nonzero_jacobian(f, xi);
  OptimizerConfig cfg = config;
  // Only the left partition acts; the right factor of S_f is inert.
  cfg.scheme = GroupScheme::make(Side::kLeft, config.scheme.left, BlockPartition::full(m));
  const DenseMatrix s_f = gram_sqrt(f);
  OptimizationReport report = minimize_cross_condition(s_f, pseudoinverse(jac), cfg);
  GroupElement x = report.final_element;
  x.scheme = config.scheme;
  report.final_element.scheme = config.scheme;
  return {x, std::move(report)};
}

WeightData polysys_weight_data(const PolynomialSystem& f) {
  const double d = f.max_degree();
  const double mn = static_cast<double>(f.size() + f.nvars());
  return {d + 2.0, std::pow(d + 2.0, 1.0 - mn) / mn};
}

PolysysState evaluate_polysys(const PolynomialSystem& f, const Vector& xi, const GroupElement& g) {
  const GroupScheme& scheme = g.scheme;
  if (scheme.m() != f.size() || (scheme.two_sided() && scheme.n() != f.nvars()))
    throw Error(ErrorCode::kDimensionMismatch, "scheme does not match system");
  const DenseMatrix jac = nonzero_jacobian(f, xi);

  PolynomialSystem w = scheme.two_sided() ? change_variables(g.y, f) : f;
  w = shuffle(g.x, w);
  DenseMatrix b = g.x * jac;
  if (scheme.two_sided()) b = b * block_inverse(scheme.right, g.y);
  const auto factors = svd(b);
  const DenseMatrix c = pseudoinverse(factors);

  const double nw2 = std::pow(bw_norm_system(w), 2);
  const double nc2 = c.squaredNorm();
  PolysysState s;
  s.value = 0.5 * (std::log(nw2) + std::log(nc2));
  s.mu_f = std::sqrt(nw2 * nc2);
  s.mu = std::sqrt(nw2) / factors.min_nonzero_singular();

  const DenseMatrix p = gram_matrix(w) / nw2 - c.adjoint() * c / nc2;
  DenseMatrix q;
  if (scheme.two_sided()) q = -variable_pairings(w).transpose() / nw2 + c * c.adjoint() / nc2;
  s.grad = project_to_lie(scheme, p, q);
  s.grad_norm = norm(s.grad);
  return s;
}

std::pair<GroupElement, OptimizationReport> precondition_full(const PolynomialSystem& f,
                                                              const Vector& xi,
                                                              const OptimizerConfig& config) {
  if (!config.scheme.two_sided() || config.scheme.m() != f.size() || config.scheme.n() != f.nvars())
    throw Error(ErrorCode::kDimensionMismatch, "full preconditioning needs a left_right scheme of size m, n");
  const WeightData weights = polysys_weight_data(f);
  OptimizationReport report;
  report.mode = OptimizerMode::kGeneral;
  report.step = config.step_size.value_or(1.0 / weights.weight_norm);

  GroupElement g = GroupElement::identity(config.scheme);
  PolysysState s = evaluate_polysys(f, xi, g);
  report.initial_kF = s.mu_f;
  report.initial_kappa = s.mu;
  for (int k = 0;; ++k) {
    const auto bound = duality_gap_bound(s.grad_norm, weights);
    report.iterations.push_back({k, s.value, s.grad_norm, bound, s.mu_f, s.mu});
    report.final_element = g;
    report.final_kF = s.mu_f;
    report.final_kappa = s.mu;
    report.certificate = bound;
    if (bound && *bound <= config.target_eps) {
      report.termination = Termination::kCertified;
      break;
    }
    if (config.grad_tol_override && s.grad_norm <= *config.grad_tol_override) {
      report.termination = Termination::kConverged;
      break;
    }
    if (k >= config.max_iters) {
      report.termination = Termination::kMaxIters;
      break;
    }
    double step = report.step;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings && !accepted; ++h, step *= 0.5) {
      GroupElement next = exp_action(g, s.grad, -step);
      PolysysState trial = evaluate_polysys(f, xi, next);
      if (step_accepted(trial.value, s.value)) {
        g = std::move(next);
        s = std::move(trial);
        accepted = true;
      }
    }
    if (!accepted) {
      report.termination = Termination::kConverged;
      break;
    }
  }
  return {report.final_element, std::move(report)};
}

double h_xi(const Vector& xi, const RealVector& t) {
  const Index n = xi.size();
  if (t.size() != n) throw Error(ErrorCode::kDimensionMismatch, "torus point dimension");
  RealVector u(n);
  for (Index k = 0; k < n; ++k) {
    if (xi(k) == Complex(0.0)) throw Error(ErrorCode::kZeroCoordinate, "zero coordinate", static_cast<std::size_t>(k));
    u(k) = std::log(std::abs(xi(k))) - std::log(t(k));
  }
  const RealVector e = static_cast<double>(n) * u.array() - u.sum();
  const double top = e.maxCoeff();
  return top + std::log((e.array() - top).exp().sum());
}

RealVector h_xi_log_gradient(const Vector& xi, const RealVector& t) {
  const Index n = xi.size();
  if (t.size() != n) throw Error(ErrorCode::kDimensionMismatch, "torus point dimension");
  RealVector u(n);
  for (Index k = 0; k < n; ++k) {
    if (xi(k) == Complex(0.0)) throw Error(ErrorCode::kZeroCoordinate, "zero coordinate", static_cast<std::size_t>(k));
    u(k) = std::log(std::abs(xi(k))) - std::log(t(k));
  }
  const RealVector e = static_cast<double>(n) * u.array() - u.sum();
  RealVector p = (e.array() - e.maxCoeff()).exp();
  p /= p.sum();
  // d e_i / d log t_k = 1 - n delta_ik.
  return RealVector::Ones(n) - static_cast<double>(n) * p;
}

namespace {

struct TorusParts {
  PolynomialSystem w;
  DenseMatrix c;
  double nw2 = 0.0;
  double nc2 = 0.0;
  double mu_f = 0.0;
  double mu = 0.0;
};

TorusParts torus_parts(const PolynomialSystem& f, const Vector& xi, const GroupElement& x,
                       const TorusPoint& t) {
  if (x.scheme.two_sided() || x.scheme.m() != f.size())
    throw Error(ErrorCode::kDimensionMismatch, "torus preconditioning needs a left scheme of size m");
  if (t.t.size() != f.nvars() || (t.t.array() <= 0.0).any())
    throw Error(ErrorCode::kInvalidArgument, "torus point must be positive with one entry per variable");
  TorusParts out;
  out.w = shuffle(x.x, torus_action(t.t, f));
  const DenseMatrix xj = x.x * nonzero_jacobian(f, xi);
  const DenseMatrix b = xj * t.t.cast<Complex>().asDiagonal();
  const auto factors = svd(b);
  out.c = pseudoinverse(factors);
  out.nw2 = std::pow(bw_norm_system(out.w), 2);
  out.nc2 = out.c.squaredNorm();
  out.mu_f = std::sqrt(out.nw2 * out.nc2);
  // diag(t) cannot change the rank. A drop means t is so extreme that the
  // cutoff discarded real singular values, and the pseudoinverse is wrong.
  if (factors.rank() < svd(xj).rank()) out.mu_f = std::numeric_limits<double>::infinity();
  out.mu = std::sqrt(out.nw2) / factors.min_nonzero_singular();
  return out;
}

}  // namespace

double torus_objective(const PolynomialSystem& f, const Vector& xi, const GroupElement& x,
                       const TorusPoint& t) {
  const double h = h_xi(xi, t.t);
  return torus_parts(f, xi, x, t).mu_f + h;
}

TorusGradient torus_gradient(const PolynomialSystem& f, const Vector& xi, const GroupElement& x,
                             const TorusPoint& t) {
  const RealVector grad_h = h_xi_log_gradient(xi, t.t);
  const TorusParts parts = torus_parts(f, xi, x, t);
  const Index n = f.nvars();

  TorusGradient out;
  out.value = parts.mu_f + h_xi(xi, t.t);
  const DenseMatrix p = gram_matrix(parts.w) / parts.nw2 - parts.c.adjoint() * parts.c / parts.nc2;
  out.x_grad = project_to_lie(x.scheme, p, DenseMatrix()) * parts.mu_f;

  // d log ||w||_W / d log t_k = sum alpha_k |c|^2 weight / ||w||^2, and
  // d log ||pinv(B diag t)||_F / d log t_k = -(C C*)_kk / ||C||^2.
  RealVector a = RealVector::Zero(n);
  for (const auto& poly : parts.w.polynomials())
    for (const auto& [alpha, c] : poly.terms()) {
      Polynomial mono(n);
      mono.add_term(alpha, c);
      const double mass = std::pow(bw_norm(mono), 2);
      for (Index k = 0; k < n; ++k) a(k) += alpha[static_cast<std::size_t>(k)] * mass;
    }
  a /= parts.nw2;
  const RealVector b = (parts.c * parts.c.adjoint()).diagonal().real() / parts.nc2;
  out.log_t_grad = parts.mu_f * (a - b) + grad_h;
  return out;
}

SparsePreconditioner precondition_sparse(const PolynomialSystem& f, const Vector& xi,
                                         const OptimizerConfig& config) {
  if (config.scheme.two_sided() || config.scheme.m() != f.size())
    throw Error(ErrorCode::kDimensionMismatch, "sparse preconditioning needs a left scheme of size m");
  const double tol = config.grad_tol_override.value_or(config.target_eps);
  SparsePreconditioner out;
  out.x = GroupElement::identity(config.scheme);
  out.t.t = RealVector::Ones(f.nvars());
  OptimizationReport& report = out.report;
  report.mode = OptimizerMode::kGeneral;
  report.step = config.step_size.value_or(0.125);

  auto record = [&](int k, const TorusGradient& gr) {
    const TorusParts parts = torus_parts(f, xi, out.x, out.t);
    const double gnorm = std::sqrt(std::pow(norm(gr.x_grad), 2) + gr.log_t_grad.squaredNorm());
    report.iterations.push_back({k, gr.value, gnorm, std::nullopt, parts.mu_f, parts.mu});
    if (k == 0) {
      report.initial_kF = parts.mu_f;
      report.initial_kappa = parts.mu;
    }
    report.final_kF = parts.mu_f;
    report.final_kappa = parts.mu;
    return gnorm;
  };

  TorusGradient gr = torus_gradient(f, xi, out.x, out.t);
  for (int k = 0;; ++k) {
    const double gnorm = record(k, gr);
    report.final_element = out.x;
    if (gnorm <= tol) {
      report.termination = Termination::kConverged;
      break;
    }
    if (k >= config.max_iters) {
      report.termination = Termination::kMaxIters;
      break;
    }
    double step = report.step;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings && !accepted; ++h, step *= 0.5) {
      // An overlong trial step can underflow a block or a torus coordinate;
      // that counts as a rejected step.
      GroupElement x_next;
      TorusPoint t_next;
      double value;
      try {
        x_next = exp_action(out.x, gr.x_grad, -step);
        t_next.t = out.t.t.cwiseProduct((-step * gr.log_t_grad).array().exp().matrix());
        if (!(t_next.t.array() > 0.0).all()) continue;
        value = torus_objective(f, xi, x_next, t_next);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kSingularBlock && e.code() != ErrorCode::kZeroCoordinate) throw;
        continue;
      }
      if (step_accepted(value, gr.value)) {
        out.x = std::move(x_next);
        out.t = std::move(t_next);
        accepted = true;
      }
    }
    if (!accepted) {
      report.termination = Termination::kConverged;
      break;
    }
    gr = torus_gradient(f, xi, out.x, out.t);
  }
  return out;
}

}  // namespace geoprec
