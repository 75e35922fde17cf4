// Linear expansion of the two-stage estimator around theta*, plug-in
// covariance and confidence intervals, and leading terms of the
// generalization gap.
#pragma once

#include "advlin/core.hpp"

#include <vector>

namespace advlin {

/// theta_hat - theta* ~ m1 (t0h - t0) + m2 a'(Sh - S)a + m3 (Sh - S)a,
/// a = theta* - theta0, valid in the interior regime.
struct BahadurOperators {
  Matrix m1;
  Vector m2;
  Matrix m3;
  Matrix hessian;        // half Hessian of R0 at theta*
  double a_ratio = 0.0;  // |theta*| / |theta* - theta0|_S
};

/// Throws RegimeError when theta* is (numerically) 0 or theta0.
[[nodiscard]] BahadurOperators bahadur_operators(const Vector& theta_star, const Vector& theta0,
                                                 const Matrix& sigma, double delta);

/// Plug-in covariance of theta_hat for a least-squares first stage:
///   AtTheta0  sigma2_hat (X'X)^{-1}
///   AtZero    0
///   Interior  (1/n^2) sum_i psi_i psi_i' from empirical influence values.
/// Interior solutions within 1e-8 of a threshold raise TransitionPointError.
[[nodiscard]] Matrix plugin_covariance(const FirstStage& fs, const RobustSolution& sol, const Dataset& data);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// theta_hat_i +- z_{(1+level)/2} sqrt(cov_ii).
[[nodiscard]] std::vector<Interval> confidence_intervals(const Vector& theta_hat, const Matrix& cov, double level);

struct ErrorTerms {
  double e1_sigma = 0.0;
  double e1_theta0 = 0.0;
  double e2_sigma = 0.0;
  double e2_theta0 = 0.0;
  double c_sigma = 0.0;
  double c_theta0 = 0.0;
};

/// c_sigma = |a|_S^2 + delta c0 |theta*| |a|_S and c_theta0 = |a|_S + delta c0 |theta*|.
[[nodiscard]] double transfer_constant_sigma(const Vector& theta_star, const ModelSpec& model, double delta);
[[nodiscard]] double transfer_constant_theta0(const Vector& theta_star, const ModelSpec& model, double delta);

/// Leading terms of R0(theta_hat) - R0_hat(theta_hat) (e1) and
/// R0(theta*) - R0_hat(theta_hat) (e2). Throws TransitionPointError for delta
/// within 1e-8 of delta1.
[[nodiscard]] ErrorTerms error_decomposition(const FirstStage& fs, const ModelSpec& model, double delta);

}  // namespace advlin
