#include "geoprec/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "geoprec/errors.hpp"

namespace geoprec {

double smoothness(const GroupScheme& scheme) { return scheme.two_sided() ? 8.0 : 4.0; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged: return "converged";
    case Termination::kMaxIters: return "max_iters";
    case Termination::kCertified: return "certified";
  }
  return "unknown";
}

namespace {

using Evaluator = std::function<ObjectiveState(const GroupElement&)>;

void check_config(const OptimizerConfig& c) {
  if (!(c.target_eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "target_eps must be positive");
  if (c.max_iters < 0) throw Error(ErrorCode::kInvalidArgument, "max_iters must be nonnegative");
  if (c.step_size && !(*c.step_size > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "step_size must be positive");
  if (c.grad_tol_override && !(*c.grad_tol_override > 0.0))
    throw Error(ErrorCode::kInvalidArgument, "grad_tol_override must be positive");
}

OptimizationReport run(const Evaluator& eval, const OptimizerConfig& config, OptimizerMode mode) {
  const WeightData weights = weight_data(config.scheme);
  OptimizationReport report;
  report.mode = mode;
  report.step = config.step_size.value_or(1.0 / smoothness(config.scheme));

  GroupElement g = GroupElement::identity(config.scheme);
  for (int k = 0;; ++k) {
    const ObjectiveState s = eval(g);
    std::optional<double> bound = duality_gap_bound(s, weights);
    if (mode == OptimizerMode::kStronglyConvex) {
      // Polyak-Lojasiewicz with mu = 4 / kF^2 on the current sublevel set.
      const double kf = s.frobenius_condition();
      const double pl = s.grad_norm * s.grad_norm * kf * kf / 8.0;
      bound = bound ? std::min(*bound, pl) : pl;
    }
    report.iterations.push_back({k, s.value, s.grad_norm, bound, s.frobenius_condition(), s.kappa});
    if (k == 0) {
      report.initial_kF = s.frobenius_condition();
      report.initial_kappa = s.kappa;
    }
    report.final_element = g;
    report.final_kF = s.frobenius_condition();
    report.final_kappa = s.kappa;
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
    g = exp_action(g, s.grad, -report.step);
  }
  return report;
}

}  // namespace

OptimizationReport minimize_condition(const ComplexMatrix& a, const OptimizerConfig& config) {
  check_config(config);
  const DenseMatrix dense = a.to_dense();
  if (dense.rows() != config.scheme.m() || dense.cols() != config.scheme.n())
    throw Error(ErrorCode::kDimensionMismatch, "matrix does not match scheme");
  if (dense.isZero(0.0)) throw Error(ErrorCode::kZeroMatrix, "zero matrix");

  const auto factors = svd(dense);
  const bool full_rank = factors.rank() == std::min(dense.rows(), dense.cols());
  OptimizerMode mode = config.mode;
  if (mode == OptimizerMode::kAuto)
    mode = (!config.scheme.two_sided() && full_rank) ? OptimizerMode::kStronglyConvex
                                                      : OptimizerMode::kGeneral;
  if (mode == OptimizerMode::kStronglyConvex && !full_rank)
    throw Error(ErrorCode::kRankDeficient, "strongly convex mode needs a full rank matrix");

  return run([&](const GroupElement& g) { return evaluate(dense, g); }, config, mode);
}

OptimizationReport minimize_cross_condition(const ComplexMatrix& a, const ComplexMatrix& b,
                                            const OptimizerConfig& config) {
  check_config(config);
  const DenseMatrix da = a.to_dense();
  const DenseMatrix db = b.to_dense();
  if (da.rows() != config.scheme.m() || da.cols() != config.scheme.n() || db.cols() != da.rows())
    throw Error(ErrorCode::kDimensionMismatch, "cross factors do not match scheme");
  if (config.mode == OptimizerMode::kStronglyConvex)
    throw Error(ErrorCode::kInvalidArgument, "strongly convex mode is defined for the condition objective only");
  return run([&](const GroupElement& g) { return evaluate_cross(da, db, g); }, config,
             OptimizerMode::kGeneral);
}

long long predicted_iteration_bound(const ComplexMatrix& a, const OptimizerConfig& config,
                                    double kF_star_estimate) {
  check_config(config);
  const double kf = condition_frobenius(a);
  if (!(kF_star_estimate > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kF* must be positive");
  const double gap = std::max(0.0, std::log(kf / kF_star_estimate));
  const double lip = smoothness(config.scheme);

  bool strongly = config.mode == OptimizerMode::kStronglyConvex;
  if (config.mode == OptimizerMode::kAuto && !config.scheme.two_sided()) {
    const DenseMatrix d = a.to_dense();
    strongly = svd(d).rank() == std::min(d.rows(), d.cols());
  }
  double t = 0.0;
  if (strongly) {
    if (gap > config.target_eps) t = kf * kf * (lip / 4.0) * std::log(gap / config.target_eps);
  } else {
    const double tol = weight_data(config.scheme).weight_margin * config.target_eps;
    t = 2.0 * lip * gap / (tol * tol);
  }
  return static_cast<long long>(std::ceil(t));
}

}  // namespace geoprec
