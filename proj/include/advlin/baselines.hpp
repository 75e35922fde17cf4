// Comparison estimators: adversarial training directly on the labels, and
// the risks of the trivial predictors theta0 and 0.
#pragma once

#include "advlin/core.hpp"

namespace advlin {

struct AdvTrainOptions {
  double step0 = 0.1;
  int max_iter = 5000;
  double tol = 1e-8;        // stop when the relative objective decrease falls below this
  double smoothing = 1e-6;  // |u| -> sqrt(u^2 + s^2), |theta| -> sqrt(|theta|^2 + s^2)
  double step_growth = 2.0; // trial step multiplier after an accepted step

  void validate() const;
};

struct AdvTrainResult {
  Vector theta;
  double objective = 0.0;  // smoothed objective at theta
  int iterations = 0;
  bool converged = false;  // false: max_iter reached, theta is the best iterate
};

/// (1/n) sum_i (delta |theta| + |x_i'theta - y_i|)^2, the exact worst-case
/// training loss.
[[nodiscard]] double adv_train_objective(const Dataset& data, const Vector& theta, double delta);

/// Smoothed surrogate of adv_train_objective.
[[nodiscard]] double adv_train_smoothed_objective(const Dataset& data, const Vector& theta, double delta,
                                                  double smoothing);

/// Gradient descent with backtracking on the smoothed objective, started at
/// the least-squares solution.
[[nodiscard]] AdvTrainResult adv_train_y(const Dataset& data, double delta, const AdvTrainOptions& opt = {});

struct ReferenceRisks {
  double at_theta0 = 0.0;
  double at_zero = 0.0;
};

[[nodiscard]] ReferenceRisks reference_risks(const ModelSpec& model, double delta);

}  // namespace advlin
