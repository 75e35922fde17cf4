#include "advlin/risk.hpp"

#include "advlin/random.hpp"

#include <algorithm>
#include <cmath>

namespace advlin {
namespace {

void check_dims(const Vector& theta, const Vector& theta0, const Matrix& sigma) {
  require(theta.size() == theta0.size() && sigma.rows() == theta0.size() && sigma.cols() == theta0.size(),
          "risk: dimension mismatch");
}

void check_delta(double delta) {
  require(delta >= 0.0 && std::isfinite(delta), "risk: delta must be finite and >= 0");
}

// Pieces shared by the gradient and Hessian away from {0, theta0}.
struct RiskTerms {
  Vector diff;        // theta - theta0
  Vector sigma_diff;  // sigma (theta - theta0)
  double norm_theta;  // |theta|
  double norm_diff;   // |theta - theta0|_sigma
};

RiskTerms interior_terms(const Vector& theta, const Vector& theta0, const Matrix& sigma) {
  RiskTerms t;
  t.diff = theta - theta0;
  t.sigma_diff = sigma * t.diff;
  t.norm_theta = theta.norm();
  t.norm_diff = std::sqrt(std::max(t.diff.dot(t.sigma_diff), 0.0));
  const double radius = 1e-12 * theta0.norm();
  if (t.norm_theta <= radius || t.norm_theta == 0.0)
    throw SingularPointError("risk derivative undefined at theta = 0");
  if (t.diff.norm() <= radius || t.norm_diff == 0.0)
    throw SingularPointError("risk derivative undefined at theta = theta0");
  return t;
}

struct RunningMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void push(double v) {
    ++count;
    const double d = v - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (v - mean);
  }

  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(count + o.count);
    const double d = o.mean - mean;
    mean += d * static_cast<double>(o.count) / total;
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / total;
    count += o.count;
  }
};

constexpr std::int64_t kMonteCarloChunk = 4096;

}  // namespace

double adversarial_risk(const Vector& theta, const Vector& theta0, const Matrix& sigma, double delta) {
  check_dims(theta, theta0, sigma);
  check_delta(delta);
  const Vector diff = theta - theta0;
  const double nd = quad_norm(diff, sigma);
  const double nt = theta.norm();
  return nd * nd + 2.0 * delta * kC0 * nd * nt + delta * delta * nt * nt;
}

double adversarial_risk(const Vector& theta, const ModelSpec& model, double delta) {
  return adversarial_risk(theta, model.theta0(), model.sigma(), delta);
}

double standard_risk(const Vector& theta, const ModelSpec& model) {
  check_dims(theta, model.theta0(), model.sigma());
  const Vector diff = theta - model.theta0();
  return std::max(diff.dot(model.sigma() * diff), 0.0);
}

double adversarial_prediction_risk(const Vector& theta, const ModelSpec& model, double delta) {
  check_dims(theta, model.theta0(), model.sigma());
  check_delta(delta);
  const double v = std::sqrt(standard_risk(theta, model) + model.noise_var());
  const double nt = theta.norm();
  return v * v + 2.0 * delta * kC0 * nt * v + delta * delta * nt * nt;
}

Vector risk_gradient(const Vector& theta, const Vector& theta0, const Matrix& sigma, double delta) {
  check_dims(theta, theta0, sigma);
  check_delta(delta);
  if (delta == 0.0) return 2.0 * (sigma * (theta - theta0));
  const RiskTerms t = interior_terms(theta, theta0, sigma);
  const double a = t.norm_theta / t.norm_diff;
  return 2.0 * ((1.0 + delta * kC0 * a) * t.sigma_diff + (delta * kC0 / a + delta * delta) * theta);
}

Vector risk_gradient(const Vector& theta, const ModelSpec& model, double delta) {
  return risk_gradient(theta, model.theta0(), model.sigma(), delta);
}

Matrix risk_hessian(const Vector& theta, const Vector& theta0, const Matrix& sigma, double delta) {
  check_dims(theta, theta0, sigma);
  check_delta(delta);
  if (delta == 0.0) return 0.5 * (sigma + sigma.transpose());

  const RiskTerms t = interior_terms(theta, theta0, sigma);
  const double dc = delta * kC0;
  const double a = t.norm_theta / t.norm_diff;

  // dA/dtheta and d(1/A)/dtheta with A = |theta| / |theta - theta0|_S.
  const Vector grad_a = theta / (t.norm_theta * t.norm_diff) -
                        t.norm_theta * t.sigma_diff / (t.norm_diff * t.norm_diff * t.norm_diff);
  const Vector grad_inv_a = t.sigma_diff / (t.norm_theta * t.norm_diff) -
                            t.norm_diff * theta / (t.norm_theta * t.norm_theta * t.norm_theta);

  Matrix h = (1.0 + dc * a) * sigma;
  h.diagonal().array() += dc / a + delta * delta;
  h.noalias() += dc * t.sigma_diff * grad_a.transpose();
  h.noalias() += dc * theta * grad_inv_a.transpose();
  return 0.5 * (h + h.transpose());
}

Matrix risk_hessian(const Vector& theta, const ModelSpec& model, double delta) {
  return risk_hessian(theta, model.theta0(), model.sigma(), delta);
}

Vector worst_case_input(const Vector& x, const Vector& theta, double delta, double target) {
  require(x.size() == theta.size(), "worst_case_input: dimension mismatch");
  check_delta(delta);
  const double nt = theta.norm();
  if (nt == 0.0) return x;
  const double sign = (x.dot(theta) - target) >= 0.0 ? 1.0 : -1.0;
  return x + (delta * sign / nt) * theta;
}

MonteCarloEstimate monte_carlo_risk(const Vector& theta, const ModelSpec& model, double delta,
                                    std::int64_t n_samples, std::uint64_t seed) {
  check_dims(theta, model.theta0(), model.sigma());
  check_delta(delta);
  require(n_samples >= 1, "monte_carlo_risk: n_samples must be >= 1");

  const Eigen::LLT<Matrix> llt(model.sigma());
  // x = L z, so x'(theta - theta0) = z'(L'(theta - theta0)).
  const Vector w = llt.matrixU() * (theta - model.theta0());
  const double shift = delta * theta.norm();
  const Eigen::Index p = theta.size();

  RunningMoments total;
  const std::int64_t n_chunks = (n_samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  for (std::int64_t k = 0; k < n_chunks; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> normal;
    const std::int64_t m = std::min(kMonteCarloChunk, n_samples - k * kMonteCarloChunk);
    RunningMoments chunk;
    for (std::int64_t i = 0; i < m; ++i) {
      double u = 0.0;
      for (Eigen::Index j = 0; j < p; ++j) u += normal(rng) * w(j);
      const double v = shift + std::abs(u);
      chunk.push(v * v);
    }
    total.merge(chunk);
  }

  MonteCarloEstimate out;
  out.mean = total.mean;
  if (total.count > 1) {
    const double var = total.m2 / static_cast<double>(total.count - 1);
    out.std_error = std::sqrt(var / static_cast<double>(total.count));
  }
  return out;
}

}  // namespace advlin
