// Closed-form adversarial risk of a linear predictor under l2 covariate
// attacks with Gaussian covariates, plus its derivatives and attack points.
//
// R0(theta, delta) = |theta - theta0|_S^2 + 2 delta c0 |theta - theta0|_S |theta|
//                    + delta^2 |theta|^2
//
// Every function taking (theta0, sigma) assumes sigma is symmetric PSD; the
// ModelSpec overloads inherit the validation done by ModelSpec.
#pragma once

#include "advlin/core.hpp"

#include <cstdint>

namespace advlin {

[[nodiscard]] double adversarial_risk(const Vector& theta, const Vector& theta0, const Matrix& sigma,
                                      double delta);
[[nodiscard]] double adversarial_risk(const Vector& theta, const ModelSpec& model, double delta);

/// |theta - theta0|_S^2, the risk without attack.
[[nodiscard]] double standard_risk(const Vector& theta, const ModelSpec& model);

/// Worst-case risk against the noisy response y instead of x'theta0.
/// Assumes Gaussian noise, so x'(theta - theta0) - eps ~ N(0, |theta-theta0|_S^2 + noise_var).
[[nodiscard]] double adversarial_prediction_risk(const Vector& theta, const ModelSpec& model, double delta);

/// Full gradient of R0 in theta. Undefined at theta in {0, theta0} when delta > 0.
[[nodiscard]] Vector risk_gradient(const Vector& theta, const Vector& theta0, const Matrix& sigma,
                                   double delta);
[[nodiscard]] Vector risk_gradient(const Vector& theta, const ModelSpec& model, double delta);

/// Half the Hessian of R0, symmetrized. Equals sigma when delta = 0.
[[nodiscard]] Matrix risk_hessian(const Vector& theta, const Vector& theta0, const Matrix& sigma,
                                  double delta);
[[nodiscard]] Matrix risk_hessian(const Vector& theta, const ModelSpec& model, double delta);

/// Maximizer of (x*'theta - target)^2 over the ball |x* - x| <= delta.
/// Ties (x'theta == target) move in the +theta direction.
[[nodiscard]] Vector worst_case_input(const Vector& x, const Vector& theta, double delta, double target);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample average of (delta |theta| + |x'(theta - theta0)|)^2 with x ~ N(0, sigma).
/// Samples are drawn in fixed-size chunks; chunk k uses the stream
/// derive_seed(seed, k), so the result depends only on (seed, n_samples).
[[nodiscard]] MonteCarloEstimate monte_carlo_risk(const Vector& theta, const ModelSpec& model, double delta,
                                                  std::int64_t n_samples, std::uint64_t seed);

}  // namespace advlin
