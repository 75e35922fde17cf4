// Regime thresholds and the optimal shrinkage level lambda*(delta).
//
// theta(lambda) = (S + lambda I)^{-1} S theta0 and theta* = theta(lambda*).
// The root is found in eta = 1/lambda, where g(eta) changes sign once.
#pragma once

#include "advlin/core.hpp"

namespace advlin {

struct SolverConfig {
  double tol_g = 1e-12;  // absolute tolerance on |g(eta)|
  int max_bisect = 200;
  double bracket_growth = 2.0;
  double eta_init = 1.0;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct Thresholds {
  double delta1 = 0.0;
  double delta2 = 0.0;
};

/// delta1 = c0 |theta0| / |theta0|_{S^-1}, delta2 = |S theta0| / (c0 |theta0|_S).
[[nodiscard]] Thresholds thresholds(const Vector& theta0, const Matrix& sigma);

/// (S + lambda I)^{-1} S theta0; lambda = 0 returns theta0 unchanged.
[[nodiscard]] Vector theta_of_lambda(const Vector& theta0, const Matrix& sigma, double lambda);

/// Stationarity function in eta = 1/lambda; g(0) is the limit 1 - delta/delta2.
[[nodiscard]] double g_of_eta(const Vector& theta0, const Matrix& sigma, double delta, double eta);

[[nodiscard]] RobustSolution solve(const Vector& theta0, const Matrix& sigma, double delta,
                                   const SolverConfig& cfg = {});

/// The delta whose optimal shrinkage level is lambda (> 0).
[[nodiscard]] double delta_of_lambda(const Vector& theta0, const Matrix& sigma, double lambda);

/// The ridge path of one (theta0, sigma) pair in the eigenbasis of sigma.
/// Construct once and reuse across many delta or lambda values; every
/// evaluation below is O(p) except theta().
class ShrinkagePath {
 public:
  /// Throws DegenerateModelError for theta0 = 0 and FactorizationError
  /// unless sigma is symmetric positive definite.
  ShrinkagePath(const Vector& theta0, const Matrix& sigma);

  [[nodiscard]] const Thresholds& thresholds() const noexcept { return thresholds_; }
  [[nodiscard]] double g(double delta, double eta) const;
  [[nodiscard]] double delta_of_lambda(double lambda) const;
  [[nodiscard]] Vector theta(double lambda) const;
  [[nodiscard]] RobustSolution solve(double delta, const SolverConfig& cfg = {}) const;

 private:
  Vector theta0_;
  Matrix basis_;  // eigenvectors of sigma, columns
  Vector eig_;    // eigenvalues of sigma
  Vector coef_;   // basis' theta0
  Thresholds thresholds_;
};

}  // namespace advlin
