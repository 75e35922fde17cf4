#include "advlin/baselines.hpp"

#include "advlin/risk.hpp"

#include <cmath>

namespace advlin {
namespace {

struct Smoothed {
  double value;
  Vector grad;
};

Smoothed smoothed_with_gradient(const Matrix& x, const Vector& y, const Vector& theta, double delta, double s) {
  const double n = static_cast<double>(x.rows());
  const double norm_s = std::sqrt(theta.squaredNorm() + s * s);
  const Vector r = x * theta - y;
  const Vector rs = (r.array().square() + s * s).sqrt().matrix();
  const Vector t = (delta * norm_s + rs.array()).matrix();
  Smoothed out;
  out.value = t.squaredNorm() / n;
  out.grad = (2.0 / n) * (delta * t.sum() / norm_s * theta +
                          x.transpose() * (t.array() * r.array() / rs.array()).matrix());
  return out;
}

}  // namespace

void AdvTrainOptions::validate() const {
  if (!(step0 > 0.0)) throw ConfigError("AdvTrainOptions: step0 must be > 0");
  if (max_iter < 1) throw ConfigError("AdvTrainOptions: max_iter must be >= 1");
  if (!(tol > 0.0)) throw ConfigError("AdvTrainOptions: tol must be > 0");
  if (!(smoothing > 0.0)) throw ConfigError("AdvTrainOptions: smoothing must be > 0");
  if (!(step_growth >= 1.0)) throw ConfigError("AdvTrainOptions: step_growth must be >= 1");
}

double adv_train_objective(const Dataset& data, const Vector& theta, double delta) {
  require(theta.size() == data.p(), "adv_train_objective: dimension mismatch");
  const Vector r = data.x() * theta - data.y();
  const double shift = delta * theta.norm();
  return ((shift + r.array().abs()).square().sum()) / static_cast<double>(data.n());
}

double adv_train_smoothed_objective(const Dataset& data, const Vector& theta, double delta, double smoothing) {
  require(theta.size() == data.p(), "adv_train_smoothed_objective: dimension mismatch");
  const double norm_s = std::sqrt(theta.squaredNorm() + smoothing * smoothing);
  const Vector r = data.x() * theta - data.y();
  const auto rs = (r.array().square() + smoothing * smoothing).sqrt();
  return (delta * norm_s + rs).square().sum() / static_cast<double>(data.n());
}

AdvTrainResult adv_train_y(const Dataset& data, double delta, const AdvTrainOptions& opt) {
  opt.validate();
  require(delta >= 0.0 && std::isfinite(delta), "adv_train_y: delta must be finite and >= 0");
  const Matrix& x = data.x();
  const Vector& y = data.y();
  const double s = opt.smoothing;

  Vector theta = Eigen::CompleteOrthogonalDecomposition<Matrix>(x).solve(y);
  Smoothed cur = smoothed_with_gradient(x, y, theta, delta, s);
  double step = opt.step0;

  AdvTrainResult out;
  for (int it = 0; it < opt.max_iter; ++it) {
    out.iterations = it + 1;
    const double gnorm2 = cur.grad.squaredNorm();
    if (gnorm2 == 0.0) {
      out.converged = true;
      break;
    }
    // Armijo backtracking.
    bool accepted = false;
    Vector trial;
    Smoothed next;
    for (int b = 0; b < 60; ++b) {
      trial = theta - step * cur.grad;
      next = smoothed_with_gradient(x, y, trial, delta, s);
      if (next.value <= cur.value - 0.5 * step * gnorm2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.converged = true;  // no descent possible at floating point resolution
      break;
    }
    const double decrease = (cur.value - next.value) / std::max(cur.value, 1e-300);
    theta = trial;
    cur = std::move(next);
    step *= opt.step_growth;
    if (decrease < opt.tol) {
      out.converged = true;
      break;
    }
  }
  out.theta = theta;
  out.objective = cur.value;
  return out;
}

ReferenceRisks reference_risks(const ModelSpec& model, double delta) {
  ReferenceRisks out;
  out.at_theta0 = adversarial_risk(model.theta0(), model, delta);
  out.at_zero = adversarial_risk(Vector::Zero(model.dim()), model, delta);
  return out;
}

}  // namespace advlin
