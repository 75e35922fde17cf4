#include "advlin/core.hpp"

#include <cmath>

namespace advlin {

void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

ModelSpec::ModelSpec(Vector theta0, Matrix sigma, double noise_var)
    : theta0_(std::move(theta0)), sigma_(std::move(sigma)), noise_var_(noise_var) {
  require(theta0_.size() >= 1, "ModelSpec: p must be at least 1");
  require(sigma_.rows() == theta0_.size() && sigma_.cols() == theta0_.size(),
          "ModelSpec: sigma must be p x p with p = len(theta0)");
  require(noise_var_ >= 0.0 && std::isfinite(noise_var_), "ModelSpec: noise_var must be >= 0");
  require(theta0_.allFinite() && sigma_.allFinite(), "ModelSpec: non-finite entries");
  require(is_symmetric(sigma_), "ModelSpec: sigma is not symmetric");
  Eigen::LLT<Matrix> llt(sigma_);
  if (llt.info() != Eigen::Success) throw FactorizationError("ModelSpec: sigma is not positive definite");
}

Dataset::Dataset(Matrix x, Vector y, std::optional<Matrix> x_unlabeled)
    : x_(std::move(x)), y_(std::move(y)), x_unlabeled_(std::move(x_unlabeled)) {
  require(x_.rows() >= 1, "Dataset: n must be at least 1");
  require(x_.rows() == y_.size(), "Dataset: rows of x must equal length of y");
  if (x_unlabeled_) {
    require(x_unlabeled_->cols() == x_.cols(), "Dataset: unlabeled rows have wrong column count");
  }
}

Matrix Dataset::all_rows() const {
  if (!x_unlabeled_ || x_unlabeled_->rows() == 0) return x_;
  Matrix all(x_.rows() + x_unlabeled_->rows(), x_.cols());
  all << x_, *x_unlabeled_;
  return all;
}

ShrinkageLevel ShrinkageLevel::finite(double value) {
  require(value >= 0.0 && std::isfinite(value), "ShrinkageLevel: lambda must be finite and >= 0");
  return ShrinkageLevel(value, false);
}

double ShrinkageLevel::value() const {
  if (infinite_) throw RegimeError("lambda* is infinite (theta* = 0)");
  return value_;
}

const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::AtTheta0: return "at_theta0";
    case Regime::Interior: return "interior";
    case Regime::AtZero: return "at_zero";
  }
  return "unknown";
}

FirstStage::FirstStage(Vector theta0_hat, Matrix sigma_hat, double noise_var_hat)
    : theta0_hat_(std::move(theta0_hat)), sigma_hat_(std::move(sigma_hat)), noise_var_hat_(noise_var_hat) {
  require(sigma_hat_.rows() == theta0_hat_.size() && sigma_hat_.cols() == theta0_hat_.size(),
          "FirstStage: sigma_hat must be p x p");
  require(noise_var_hat_ >= 0.0, "FirstStage: noise_var_hat must be >= 0");
  require(is_symmetric(sigma_hat_), "FirstStage: sigma_hat is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_hat_, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  require(es.eigenvalues().minCoeff() >= -1e-10 * scale, "FirstStage: sigma_hat is not positive semidefinite");
}

FirstStage FirstStage::with_sigma(Matrix sigma_hat) const {
  return FirstStage(theta0_hat_, std::move(sigma_hat), noise_var_hat_);
}

FirstStage FirstStage::from_truth(const ModelSpec& model) {
  return FirstStage(model.theta0(), model.sigma(), model.noise_var());
}

double sigma_norm(const Vector& v, const Matrix& a) {
  require(a.rows() == a.cols() && a.rows() == v.size(), "sigma_norm: dimension mismatch");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw FactorizationError("sigma_norm: matrix is not positive definite");
  // ||L'v||^2 = v' a v, and stays nonnegative in floating point.
  return (llt.matrixU() * v).norm();
}

double quad_norm(const Vector& v, const Matrix& a) {
  return std::sqrt(std::max(v.dot(a * v), 0.0));
}

Vector pd_solve(const Matrix& a, const Vector& b) {
  require(a.rows() == a.cols() && a.rows() == b.size(), "pd_solve: dimension mismatch");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw FactorizationError("pd_solve: matrix is not positive definite");
  return llt.solve(b);
}

Matrix pd_solve(const Matrix& a, const Matrix& b) {
  require(a.rows() == a.cols() && a.rows() == b.rows(), "pd_solve: dimension mismatch");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw FactorizationError("pd_solve: matrix is not positive definite");
  return llt.solve(b);
}

}  // namespace advlin
