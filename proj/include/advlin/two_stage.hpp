// Two-stage estimator: plug first-stage estimates into the population
// minimizer map theta*(delta).
#pragma once

#include "advlin/core.hpp"
#include "advlin/solver.hpp"

namespace advlin {

/// Solves for theta*(delta) with (theta0_hat, sigma_hat) in place of the
/// truth. A zero theta0_hat gives theta = 0 at every delta.
[[nodiscard]] RobustSolution fit(const FirstStage& fs, double delta, const SolverConfig& cfg = {});

/// Plug-in adversarial risk |t - t0h|^2_Sh + 2 delta c0 |t - t0h|_Sh |t| + delta^2 |t|^2.
[[nodiscard]] double empirical_risk(const Vector& theta, const FirstStage& fs, double delta);

/// R0(theta_hat, delta) - R0(theta*, delta) under the true model.
[[nodiscard]] double excess_risk(const FirstStage& fs, const ModelSpec& model, double delta,
                                 const SolverConfig& cfg = {});

}  // namespace advlin
