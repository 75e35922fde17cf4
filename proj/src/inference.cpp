#include "advlin/inference.hpp"

#include "advlin/risk.hpp"
#include "advlin/solver.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>

namespace advlin {
namespace {

constexpr double kTransitionBand = 1e-8;

}  // namespace

BahadurOperators bahadur_operators(const Vector& theta_star, const Vector& theta0, const Matrix& sigma,
                                   double delta) {
  require(theta_star.size() == theta0.size() && sigma.rows() == theta0.size() && sigma.cols() == theta0.size(),
          "bahadur_operators: dimension mismatch");
  require(delta >= 0.0 && std::isfinite(delta), "bahadur_operators: delta must be finite and >= 0");
  const double radius = 1e-12 * theta0.norm();
  const Vector a = theta_star - theta0;
  if (theta_star.norm() <= radius || theta_star.norm() == 0.0 || a.norm() <= radius)
    throw RegimeError("bahadur_operators: theta* is at 0 or theta0");

  BahadurOperators ops;
  ops.hessian = risk_hessian(theta_star, theta0, sigma, delta);
  Eigen::LLT<Matrix> llt(ops.hessian);
  if (llt.info() != Eigen::Success) throw FactorizationError("bahadur_operators: Hessian is not positive definite");

  const Vector sa = sigma * a;
  const double na = std::sqrt(a.dot(sa));
  const double nt = theta_star.norm();
  const double dc = delta * kC0;
  const double ratio = nt / na;
  ops.a_ratio = ratio;

  Matrix m = (1.0 + dc * ratio) * sigma;
  m.noalias() -= (dc * ratio / (na * na)) * sa * sa.transpose();
  m.noalias() += (dc / (na * nt)) * theta_star * sa.transpose();
  ops.m1 = llt.solve(m);

  const Vector inner = theta_star / (2.0 * na * nt) - nt * sa / (2.0 * na * na * na);
  ops.m2 = -dc * llt.solve(inner);
  ops.m3 = -(1.0 + dc * ratio) * llt.solve(Matrix::Identity(theta0.size(), theta0.size()));
  return ops;
}

Matrix plugin_covariance(const FirstStage& fs, const RobustSolution& sol, const Dataset& data) {
  const Eigen::Index p = fs.dim();
  require(sol.theta.size() == p && data.p() == p, "plugin_covariance: dimension mismatch");
  const double n = static_cast<double>(data.n());

  switch (sol.regime) {
    case Regime::AtZero:
      return Matrix::Zero(p, p);
    case Regime::AtTheta0: {
      const Matrix gram = data.x().transpose() * data.x();
      return fs.noise_var_hat() * pd_solve(gram, Matrix(Matrix::Identity(p, p)));
    }
    case Regime::Interior:
      break;
  }

  const Thresholds th = thresholds(fs.theta0_hat(), fs.sigma_hat());
  if (std::abs(sol.delta - th.delta1) <= kTransitionBand || std::abs(sol.delta - th.delta2) <= kTransitionBand)
    throw TransitionPointError("plugin_covariance: delta is at a regime threshold");

  const BahadurOperators ops = bahadur_operators(sol.theta, fs.theta0_hat(), fs.sigma_hat(), sol.delta);
  const Matrix& x = data.x();
  const Matrix& s = fs.sigma_hat();
  const Vector a = sol.theta - fs.theta0_hat();
  const Vector resid = data.y() - x * fs.theta0_hat();
  const Vector xa = x * a;
  const Vector sa = s * a;
  const double q = a.dot(sa);

  // Columns are per-sample influence values.
  const Matrix score = pd_solve(s, Matrix(x.transpose() * resid.asDiagonal()));
  Matrix psi = ops.m1 * score;
  psi.noalias() += ops.m2 * (xa.array().square() - q).matrix().transpose();
  const Matrix cov_dir = (x.transpose() * xa.asDiagonal()).colwise() - sa;
  psi.noalias() += ops.m3 * cov_dir;

  Matrix cov = psi * psi.transpose() / (n * n);
  return 0.5 * (cov + cov.transpose());
}

std::vector<Interval> confidence_intervals(const Vector& theta_hat, const Matrix& cov, double level) {
  require(level > 0.0 && level < 1.0, "confidence_intervals: level must lie in (0, 1)");
  require(cov.rows() == theta_hat.size() && cov.cols() == theta_hat.size(),
          "confidence_intervals: dimension mismatch");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 * (1.0 + level));
  std::vector<Interval> out(static_cast<std::size_t>(theta_hat.size()));
  for (Eigen::Index i = 0; i < theta_hat.size(); ++i) {
    if (cov(i, i) < 0.0 || !std::isfinite(cov(i, i)))
      throw NumericError("confidence_intervals: negative or non-finite variance");
    const double half = z * std::sqrt(cov(i, i));
    out[static_cast<std::size_t>(i)] = Interval{theta_hat(i) - half, theta_hat(i) + half};
  }
  return out;
}

double transfer_constant_sigma(const Vector& theta_star, const ModelSpec& model, double delta) {
  const double na = quad_norm(theta_star - model.theta0(), model.sigma());
  return na * na + delta * kC0 * theta_star.norm() * na;
}

double transfer_constant_theta0(const Vector& theta_star, const ModelSpec& model, double delta) {
  const double na = quad_norm(theta_star - model.theta0(), model.sigma());
  return na + delta * kC0 * theta_star.norm();
}

ErrorTerms error_decomposition(const FirstStage& fs, const ModelSpec& model, double delta) {
  require(fs.dim() == model.dim(), "error_decomposition: dimension mismatch");
  require(delta >= 0.0 && std::isfinite(delta), "error_decomposition: delta must be finite and >= 0");
  const ShrinkagePath path(model.theta0(), model.sigma());
  const double delta1 = path.thresholds().delta1;
  if (std::abs(delta - delta1) <= kTransitionBand)
    throw TransitionPointError("error_decomposition: delta is at the first threshold");

  const Matrix& sigma = model.sigma();
  const Vector& theta0 = model.theta0();
  const Vector d = fs.theta0_hat() - theta0;
  const Vector theta_star = path.solve(delta).theta;

  ErrorTerms out;
  out.c_sigma = transfer_constant_sigma(theta_star, model, delta);
  out.c_theta0 = transfer_constant_theta0(theta_star, model, delta);

  if (delta < delta1) {
    const double nd = quad_norm(d, sigma);
    out.e1_theta0 = nd * nd + 2.0 * kC0 * delta * theta0.norm() * nd;
    out.e2_theta0 = -2.0 * delta * delta * theta0.dot(d);
    return out;
  }

  const Vector a = theta_star - theta0;
  const Vector sa = sigma * a;
  const double na2 = a.dot(sa);
  const double na = std::sqrt(na2);
  const Matrix ds = fs.sigma_hat() - sigma;
  out.e1_sigma = -out.c_sigma * a.dot(ds * a) / na2;
  out.e1_theta0 = 2.0 * out.c_theta0 * d.dot(sa) / na;
  out.e2_sigma = out.e1_sigma;
  out.e2_theta0 = out.e1_theta0;
  return out;
}

}  // namespace advlin
