// Shared domain types and positive-definite linear algebra for advlin.
#pragma once

#include <Eigen/Dense>

#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace advlin {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// E|Z| for a standard normal Z, i.e. sqrt(2/pi).
inline constexpr double kC0 = std::numbers::sqrt2 * std::numbers::inv_sqrtpi;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on arguments (dimensions, signs, ranges) does not hold.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A symmetric factorization failed (matrix not positive definite).
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// A derivative was requested at theta = 0 or theta = theta0.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// theta0 is the zero vector, so the regime thresholds are undefined.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  using Error::Error;
};

/// Design matrix has insufficient rank for the requested estimator.
class RankError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Operation is only defined in a different solution regime.
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// delta lies on (or numerically at) a regime boundary.
class TransitionPointError : public Error {
 public:
  using Error::Error;
};

class DesignError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Ground truth of the linear model y = x'theta0 + eps, x ~ N(0, sigma),
/// Var(eps) = noise_var. Validated on construction and immutable after.
class ModelSpec {
 public:
  ModelSpec(Vector theta0, Matrix sigma, double noise_var);

  [[nodiscard]] const Vector& theta0() const noexcept { return theta0_; }
  [[nodiscard]] const Matrix& sigma() const noexcept { return sigma_; }
  [[nodiscard]] double noise_var() const noexcept { return noise_var_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return theta0_.size(); }

 private:
  Vector theta0_;
  Matrix sigma_;
  double noise_var_;
};

/// Labeled sample (x, y) plus optional unlabeled covariate rows.
class Dataset {
 public:
  Dataset(Matrix x, Vector y, std::optional<Matrix> x_unlabeled = std::nullopt);

  [[nodiscard]] const Matrix& x() const noexcept { return x_; }
  [[nodiscard]] const Vector& y() const noexcept { return y_; }
  [[nodiscard]] const std::optional<Matrix>& x_unlabeled() const noexcept { return x_unlabeled_; }
  [[nodiscard]] Eigen::Index n() const noexcept { return x_.rows(); }
  [[nodiscard]] Eigen::Index p() const noexcept { return x_.cols(); }
  [[nodiscard]] Eigen::Index n_unlabeled() const noexcept {
    return x_unlabeled_ ? x_unlabeled_->rows() : 0;
  }

  /// Labeled rows followed by unlabeled rows.
  [[nodiscard]] Matrix all_rows() const;

 private:
  Matrix x_;
  Vector y_;
  std::optional<Matrix> x_unlabeled_;
};

/// Shrinkage level lambda in [0, +inf]. Infinity is a tag, never a float.
class ShrinkageLevel {
 public:
  static ShrinkageLevel finite(double value);
  static ShrinkageLevel infinite() noexcept { return ShrinkageLevel(0.0, true); }

  [[nodiscard]] bool is_infinite() const noexcept { return infinite_; }
  /// Throws RegimeError when infinite.
  [[nodiscard]] double value() const;

 private:
  ShrinkageLevel(double v, bool inf) noexcept : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

enum class Regime { AtTheta0, Interior, AtZero };

[[nodiscard]] const char* to_string(Regime r) noexcept;

/// Minimizer theta*(delta) (or its plug-in estimate) with solver diagnostics.
struct RobustSolution {
  Vector theta;
  ShrinkageLevel lambda_star = ShrinkageLevel::infinite();
  Regime regime = Regime::AtZero;
  double delta = 0.0;     // attack budget the solution was computed for
  double residual = 0.0;  // |g(eta*)|, 0 for boundary regimes
  int iterations = 0;
};

/// First-stage estimates (theta0_hat, sigma_hat, noise_var_hat).
class FirstStage {
 public:
  FirstStage(Vector theta0_hat, Matrix sigma_hat, double noise_var_hat);

  [[nodiscard]] const Vector& theta0_hat() const noexcept { return theta0_hat_; }
  [[nodiscard]] const Matrix& sigma_hat() const noexcept { return sigma_hat_; }
  [[nodiscard]] double noise_var_hat() const noexcept { return noise_var_hat_; }
  [[nodiscard]] Eigen::Index dim() const noexcept { return theta0_hat_.size(); }

  /// Same coefficient and noise estimates with a different covariance estimate.
  [[nodiscard]] FirstStage with_sigma(Matrix sigma_hat) const;

  /// The exact truth viewed as a first stage.
  [[nodiscard]] static FirstStage from_truth(const ModelSpec& model);

 private:
  Vector theta0_hat_;
  Matrix sigma_hat_;
  double noise_var_hat_;
};

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

/// sqrt(v' a v). Verifies that a is symmetric positive definite.
[[nodiscard]] double sigma_norm(const Vector& v, const Matrix& a);

/// sqrt(max(v' a v, 0)) without any factorization; for validated matrices
/// in inner loops.
[[nodiscard]] double quad_norm(const Vector& v, const Matrix& a);

/// Solves a x = b for symmetric positive definite a via Cholesky.
[[nodiscard]] Vector pd_solve(const Matrix& a, const Vector& b);
[[nodiscard]] Matrix pd_solve(const Matrix& a, const Matrix& b);

[[nodiscard]] bool is_symmetric(const Matrix& a, double tol = 1e-12);

/// Throws ContractViolation with `what` when the condition fails.
void require(bool condition, const std::string& what);

}  // namespace advlin
