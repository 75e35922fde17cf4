#include "advlin/two_stage.hpp"

#include "advlin/risk.hpp"

#include <cmath>

namespace advlin {

RobustSolution fit(const FirstStage& fs, double delta, const SolverConfig& cfg) {
  require(delta >= 0.0 && std::isfinite(delta), "fit: delta must be finite and >= 0");
  if (fs.theta0_hat().squaredNorm() == 0.0) {
    RobustSolution sol;
    sol.theta = Vector::Zero(fs.dim());
    sol.lambda_star = ShrinkageLevel::infinite();
    sol.regime = Regime::AtZero;
    sol.delta = delta;
    return sol;
  }
  return solve(fs.theta0_hat(), fs.sigma_hat(), delta, cfg);
}

double empirical_risk(const Vector& theta, const FirstStage& fs, double delta) {
  return adversarial_risk(theta, fs.theta0_hat(), fs.sigma_hat(), delta);
}

double excess_risk(const FirstStage& fs, const ModelSpec& model, double delta, const SolverConfig& cfg) {
  const RobustSolution est = fit(fs, delta, cfg);
  const RobustSolution best = solve(model.theta0(), model.sigma(), delta, cfg);
  return adversarial_risk(est.theta, model, delta) - adversarial_risk(best.theta, model, delta);
}

}  // namespace advlin
