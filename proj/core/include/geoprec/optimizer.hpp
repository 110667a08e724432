#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "geoprec/group.hpp"
#include "geoprec/objective.hpp"

namespace geoprec {

enum class OptimizerMode { kGeneral, kStronglyConvex, kAuto };

struct OptimizerConfig {
  GroupScheme scheme;
  double target_eps = 1e-3;
  int max_iters = 10000;
  // Empty means 1/L with L = 4 (left) or 8 (left_right).
  std::optional<double> step_size;
  OptimizerMode mode = OptimizerMode::kAuto;
  std::optional<double> grad_tol_override;
  std::uint64_t seed = 0;
};

/// Smoothness constant of C_A for the scheme.
double smoothness(const GroupScheme& scheme);

struct IterationRecord {
  int iter = 0;
  double value = 0.0;
  double grad_norm = 0.0;
  std::optional<double> duality_bound;
  double kF = 0.0;
  double kappa = 0.0;
};

enum class Termination { kConverged, kMaxIters, kCertified };

const char* to_string(Termination t);

struct OptimizationReport {
  std::vector<IterationRecord> iterations;
  GroupElement final_element;
  double initial_kF = 0.0;
  double final_kF = 0.0;
  double initial_kappa = 0.0;
  double final_kappa = 0.0;
  // Certified upper bound on log kF(final) - log kF* at exit.
  std::optional<double> certificate;
  Termination termination = Termination::kMaxIters;
  OptimizerMode mode = OptimizerMode::kGeneral;  // resolved, never kAuto
  double step = 0.0;
};

/// Gradient descent on log kF(X A Y^-1) from the identity with constant step.
/// Throws RankDeficient if strongly-convex mode is requested for rank-deficient A.
OptimizationReport minimize_condition(const ComplexMatrix& a, const OptimizerConfig& config);

/// Same loop on log ||X A Y^-1||_F + log ||Y B X^-1||_F.
OptimizationReport minimize_cross_condition(const ComplexMatrix& a, const ComplexMatrix& b,
                                            const OptimizerConfig& config);

/// Explicit iteration bound. General mode: ceil(2 L log(kF/kF*) / (gamma eps)^2).
/// Strongly convex: ceil(kF^2 (L/4) log(log(kF/kF*) / eps)), clamped at 0.
long long predicted_iteration_bound(const ComplexMatrix& a, const OptimizerConfig& config,
                                    double kF_star_estimate);

}  // namespace geoprec
