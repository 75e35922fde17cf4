#include "advlin/solver.hpp"

#include <cmath>
#include <limits>

namespace advlin {

void SolverConfig::validate() const {
  if (!(tol_g > 0.0)) throw ConfigError("SolverConfig: tol_g must be > 0");
  if (max_bisect < 1) throw ConfigError("SolverConfig: max_bisect must be >= 1");
  if (!(bracket_growth > 1.0)) throw ConfigError("SolverConfig: bracket_growth must be > 1");
  if (!(eta_init > 0.0) || !std::isfinite(eta_init)) throw ConfigError("SolverConfig: eta_init must be > 0");
}

ShrinkagePath::ShrinkagePath(const Vector& theta0, const Matrix& sigma) : theta0_(theta0) {
  require(sigma.rows() == theta0.size() && sigma.cols() == theta0.size(), "solver: dimension mismatch");
  require(is_symmetric(sigma), "solver: sigma is not symmetric");
  if (theta0.size() == 0 || theta0.squaredNorm() == 0.0)
    throw DegenerateModelError("solver: theta0 is the zero vector");

  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma);
  if (es.info() != Eigen::Success) throw FactorizationError("solver: eigendecomposition failed");
  eig_ = es.eigenvalues();
  if (!(eig_.minCoeff() > 0.0)) throw FactorizationError("solver: sigma is not positive definite");
  basis_ = es.eigenvectors();
  coef_ = basis_.transpose() * theta0;

  const Vector z2 = coef_.array().square();
  const double inv_norm_sq = (z2.array() / eig_.array()).sum();   // |theta0|^2_{S^-1}
  const double sig_norm_sq = (z2.array() * eig_.array()).sum();   // |theta0|^2_S
  const double sig2_norm_sq = (z2.array() * eig_.array().square()).sum();  // |S theta0|^2
  thresholds_.delta1 = kC0 * theta0.norm() / std::sqrt(inv_norm_sq);
  thresholds_.delta2 = std::sqrt(sig2_norm_sq) / (kC0 * std::sqrt(sig_norm_sq));
}

double ShrinkagePath::g(double delta, double eta) const {
  require(eta >= 0.0, "g_of_eta: eta must be >= 0");
  require(delta >= 0.0 && std::isfinite(delta), "g_of_eta: delta must be finite and >= 0");
  if (eta == 0.0) return 1.0 - delta / thresholds_.delta2;
  if (!std::isfinite(eta)) return -std::numeric_limits<double>::infinity();

  // eta/(eta d + 1) = 1/(d + lambda); the common factor cancels in H.
  const double lambda = 1.0 / eta;
  double s1 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < eig_.size(); ++i) {
    const double u = coef_(i) / (eig_(i) + lambda);
    s1 += eig_(i) * u * u;
    s2 += eig_(i) * eig_(i) * u * u;
  }
  const double h = std::sqrt(s2 / s1);
  return 1.0 - delta * kC0 / h + eta * (delta * kC0 * h - delta * delta);
}

double ShrinkagePath::delta_of_lambda(double lambda) const {
  require(lambda > 0.0 && std::isfinite(lambda), "delta_of_lambda: lambda must be finite and > 0");
  double s1 = 0.0;
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < eig_.size(); ++i) {
    const double u = coef_(i) / (eig_(i) + lambda);
    s1 += eig_(i) * u * u;
    s2 += eig_(i) * eig_(i) * u * u;
  }
  // |theta(l)| = sqrt(s2), |theta(l) - theta0|_S = l sqrt(s1).
  const double a = std::sqrt(s2) / (lambda * std::sqrt(s1));
  const double b = lambda * kC0 * a - kC0 / a;
  const double root = std::sqrt(b * b + 4.0 * lambda);
  return b >= 0.0 ? 0.5 * (b + root) : 2.0 * lambda / (root - b);
}

Vector ShrinkagePath::theta(double lambda) const {
  require(lambda >= 0.0 && std::isfinite(lambda), "theta_of_lambda: lambda must be finite and >= 0");
  if (lambda == 0.0) return theta0_;
  const Vector shrunk = (eig_.array() / (eig_.array() + lambda) * coef_.array()).matrix();
  return basis_ * shrunk;
}

RobustSolution ShrinkagePath::solve(double delta, const SolverConfig& cfg) const {
  cfg.validate();
  require(delta >= 0.0 && std::isfinite(delta), "solve: delta must be finite and >= 0");

  RobustSolution sol;
  sol.delta = delta;
  if (delta <= thresholds_.delta1) {
    sol.theta = theta0_;
    sol.lambda_star = ShrinkageLevel::finite(0.0);
    sol.regime = Regime::AtTheta0;
    return sol;
  }
  if (delta >= thresholds_.delta2) {
    sol.theta = Vector::Zero(theta0_.size());
    sol.lambda_star = ShrinkageLevel::infinite();
    sol.regime = Regime::AtZero;
    return sol;
  }

  // g(0) > 0 here; grow eta until g turns negative.
  double lo = 0.0;
  double hi = cfg.eta_init;
  double g_hi = g(delta, hi);
  int iterations = 0;
  while (g_hi > 0.0) {
    if (++iterations > cfg.max_bisect) throw SolverFailure("solve: no sign change found while bracketing");
    lo = hi;
    hi *= cfg.bracket_growth;
    g_hi = g(delta, hi);
  }

  double eta = hi;
  double residual = std::abs(g_hi);
  for (int k = 0; k < cfg.max_bisect && residual > cfg.tol_g; ++k) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;  // bracket collapsed to adjacent doubles
    ++iterations;
    const double g_mid = g(delta, mid);
    if (std::abs(g_mid) < residual) {
      eta = mid;
      residual = std::abs(g_mid);
    }
    if (g_mid > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (lo > 0.0) {
    const double g_lo = std::abs(g(delta, lo));
    if (g_lo < residual) {
      eta = lo;
      residual = g_lo;
    }
  }

  const double lambda = 1.0 / eta;
  sol.theta = theta(lambda);
  sol.lambda_star = ShrinkageLevel::finite(lambda);
  sol.regime = Regime::Interior;
  sol.residual = residual;
  sol.iterations = iterations;
  return sol;
}

Thresholds thresholds(const Vector& theta0, const Matrix& sigma) {
  return ShrinkagePath(theta0, sigma).thresholds();
}

Vector theta_of_lambda(const Vector& theta0, const Matrix& sigma, double lambda) {
  require(sigma.rows() == theta0.size() && sigma.cols() == theta0.size(), "theta_of_lambda: dimension mismatch");
  require(lambda >= 0.0 && std::isfinite(lambda), "theta_of_lambda: lambda must be finite and >= 0");
  if (lambda == 0.0) return theta0;
  Matrix shifted = sigma;
  shifted.diagonal().array() += lambda;
  return pd_solve(shifted, Vector(sigma * theta0));
}

double g_of_eta(const Vector& theta0, const Matrix& sigma, double delta, double eta) {
  return ShrinkagePath(theta0, sigma).g(delta, eta);
}

RobustSolution solve(const Vector& theta0, const Matrix& sigma, double delta, const SolverConfig& cfg) {
  return ShrinkagePath(theta0, sigma).solve(delta, cfg);
}

double delta_of_lambda(const Vector& theta0, const Matrix& sigma, double lambda) {
  return ShrinkagePath(theta0, sigma).delta_of_lambda(lambda);
}

}  // namespace advlin
