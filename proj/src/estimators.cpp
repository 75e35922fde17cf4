#include "advlin/estimators.hpp"

#include "advlin/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace advlin {
namespace {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Penalty weight per column: the column's root mean square when standardizing.
Vector penalty_weights(const Matrix& x, bool standardize) {
  if (!standardize) return Vector::Ones(x.cols());
  const double n = static_cast<double>(x.rows());
  return (x.colwise().squaredNorm().transpose() / n).cwiseSqrt();
}

double noise_estimate(const Vector& residual, Eigen::Index df) {
  return residual.squaredNorm() / static_cast<double>(std::max<Eigen::Index>(df, 1));
}

// Fisher-Yates with a fixed generator so fold membership is reproducible
// across standard library implementations.
std::vector<int> fold_assignment(Eigen::Index n, int n_folds, std::uint64_t seed) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (Eigen::Index pos = 0; pos < n; ++pos)
    fold[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = static_cast<int>(pos % n_folds);
  return fold;
}

Matrix take_rows(const Matrix& x, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Vector take_rows(const Vector& y, const std::vector<Eigen::Index>& rows) {
  Vector out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

}  // namespace

void LassoConfig::validate() const {
  if (n_lambda < 2) throw ConfigError("LassoConfig: n_lambda must be >= 2");
  if (!(lambda_min_ratio > 0.0 && lambda_min_ratio < 1.0))
    throw ConfigError("LassoConfig: lambda_min_ratio must lie in (0, 1)");
  if (n_folds < 2) throw ConfigError("LassoConfig: n_folds must be >= 2");
  if (!(cd_tol > 0.0)) throw ConfigError("LassoConfig: cd_tol must be > 0");
  if (cd_max_iter < 1) throw ConfigError("LassoConfig: cd_max_iter must be >= 1");
}

void SparseCovConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("SparseCovConfig: alpha must be > 0");
  if (bandwidth_override && *bandwidth_override < 0)
    throw ConfigError("SparseCovConfig: bandwidth_override must be >= 0");
  if (!(eig_floor > 0.0)) throw ConfigError("SparseCovConfig: eig_floor must be > 0");
}

FirstStage ols(const Dataset& data) {
  const Eigen::Index n = data.n();
  const Eigen::Index p = data.p();
  if (n <= p) throw RankError("ols: need more rows than columns");
  Eigen::ColPivHouseholderQR<Matrix> qr(data.x());
  if (qr.rank() < p) throw RankError("ols: design matrix is rank deficient");
  Vector coef = qr.solve(data.y());
  const Vector residual = data.y() - data.x() * coef;
  return FirstStage(std::move(coef), sample_cov(data.all_rows()), noise_estimate(residual, n - p));
}

FirstStage min_norm_ls(const Dataset& data) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(data.x());
  Vector coef = cod.solve(data.y());
  const Vector residual = data.y() - data.x() * coef;
  return FirstStage(std::move(coef), sample_cov(data.all_rows()), noise_estimate(residual, data.n() - cod.rank()));
}

std::vector<double> lasso_lambda_grid(const Matrix& x, const Vector& y, const LassoConfig& cfg) {
  cfg.validate();
  require(x.rows() == y.size() && x.rows() >= 1, "lasso: dimension mismatch");
  const double n = static_cast<double>(x.rows());
  const Vector w = penalty_weights(x, cfg.standardize);
  const Vector score = (x.transpose() * y).cwiseAbs() / n;
  double lambda_max = 0.0;
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    if (w(j) > 0.0) lambda_max = std::max(lambda_max, score(j) / w(j));

  std::vector<double> grid(static_cast<std::size_t>(cfg.n_lambda));
  const double log_ratio = std::log(cfg.lambda_min_ratio);
  for (int k = 0; k < cfg.n_lambda; ++k)
    grid[static_cast<std::size_t>(k)] = lambda_max * std::exp(log_ratio * k / (cfg.n_lambda - 1));
  grid.front() = lambda_max;
  return grid;
}

Matrix lasso_path(const Matrix& x, const Vector& y, const std::vector<double>& lambdas, const LassoConfig& cfg) {
  cfg.validate();
  require(x.rows() == y.size() && x.rows() >= 1, "lasso: dimension mismatch");
  for (std::size_t k = 1; k < lambdas.size(); ++k)
    require(lambdas[k] <= lambdas[k - 1], "lasso: lambdas must be decreasing");

  const Eigen::Index n = x.rows();
  const Eigen::Index p = x.cols();
  const double inv_n = 1.0 / static_cast<double>(n);
  const Vector w = penalty_weights(x, cfg.standardize);
  const Vector curv = x.colwise().squaredNorm().transpose() * inv_n;
  const double tol = cfg.cd_tol * std::max(y.squaredNorm() * inv_n, 1e-300);

  Matrix path = Matrix::Zero(p, static_cast<Eigen::Index>(lambdas.size()));
  Vector b = Vector::Zero(p);
  Vector r = y;
  int sweeps = 0;

  // One pass of coordinate updates; returns the largest objective decrease
  // bound curv_j * change_j^2.
  auto sweep = [&](double lambda, bool active_only) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (curv(j) == 0.0) continue;
      if (active_only && b(j) == 0.0) continue;
      const double old = b(j);
      const double rho = x.col(j).dot(r) * inv_n + curv(j) * old;
      const double updated = soft_threshold(rho, lambda * w(j)) / curv(j);
      if (updated != old) {
        r.noalias() -= (updated - old) * x.col(j);
        b(j) = updated;
        max_change = std::max(max_change, curv(j) * (updated - old) * (updated - old));
      }
    }
    ++sweeps;
    return max_change;
  };

  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    const double lambda = lambdas[k];
    while (sweeps < cfg.cd_max_iter) {
      if (sweep(lambda, false) <= tol) break;
      while (sweeps < cfg.cd_max_iter && sweep(lambda, true) > tol) {
      }
    }
    path.col(static_cast<Eigen::Index>(k)) = b;
  }
  return path;
}

LassoCvResult lasso_cv_path(const Matrix& x, const Vector& y, const LassoConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  require(x.rows() == y.size(), "lasso_cv: dimension mismatch");
  const Eigen::Index n = x.rows();
  if (n < cfg.n_folds) throw ConfigError("lasso_cv: fewer rows than folds");

  LassoCvResult out;
  out.lambdas = lasso_lambda_grid(x, y, cfg);
  const std::size_t n_lambda = out.lambdas.size();
  const auto folds = fold_assignment(n, cfg.n_folds, seed);

  Matrix fold_mse(cfg.n_folds, static_cast<Eigen::Index>(n_lambda));
  Vector fold_size(cfg.n_folds);
  for (int f = 0; f < cfg.n_folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (Eigen::Index i = 0; i < n; ++i) (folds[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    if (train.empty() || test.empty()) throw ConfigError("lasso_cv: degenerate fold");
    const Matrix x_test = take_rows(x, test);
    const Vector y_test = take_rows(y, test);
    const Matrix coefs = lasso_path(take_rows(x, train), take_rows(y, train), out.lambdas, cfg);
    const Matrix resid = (x_test * coefs).colwise() - y_test;
    fold_mse.row(f) = resid.colwise().squaredNorm() / static_cast<double>(test.size());
    fold_size(f) = static_cast<double>(test.size());
  }

  const double total = fold_size.sum();
  out.cv_mean.resize(n_lambda);
  out.cv_se.resize(n_lambda);
  for (std::size_t l = 0; l < n_lambda; ++l) {
    const Vector e = fold_mse.col(static_cast<Eigen::Index>(l));
    const double mean = fold_size.dot(e) / total;
    const double var = fold_size.dot((e.array() - mean).square().matrix()) / total / (cfg.n_folds - 1);
    out.cv_mean[l] = mean;
    out.cv_se[l] = std::sqrt(var);
  }
  out.index_min = static_cast<std::size_t>(
      std::min_element(out.cv_mean.begin(), out.cv_mean.end()) - out.cv_mean.begin());
  const double cutoff = out.cv_mean[out.index_min] + out.cv_se[out.index_min];
  out.index_1se = out.index_min;
  for (std::size_t l = 0; l < out.index_min; ++l) {
    if (out.cv_mean[l] <= cutoff) {
      out.index_1se = l;
      break;
    }
  }

  const std::size_t chosen = cfg.rule == LambdaRule::MinError ? out.index_min : out.index_1se;
  out.lambda = out.lambdas[chosen];
  const std::vector<double> prefix(out.lambdas.begin(), out.lambdas.begin() + static_cast<std::ptrdiff_t>(chosen) + 1);
  out.coef = lasso_path(x, y, prefix, cfg).rightCols(1);
  return out;
}

FirstStage lasso_cv(const Dataset& data, const LassoConfig& cfg, std::uint64_t seed) {
  LassoCvResult cv = lasso_cv_path(data.x(), data.y(), cfg, seed);
  const Vector residual = data.y() - data.x() * cv.coef;
  const auto nnz = static_cast<Eigen::Index>((cv.coef.array() != 0.0).count());
  return FirstStage(std::move(cv.coef), sample_cov(data.all_rows()), noise_estimate(residual, data.n() - nnz));
}

Matrix sample_cov(const Matrix& x_all, bool center) {
  require(x_all.rows() >= 1, "sample_cov: need at least one row");
  const double m = static_cast<double>(x_all.rows());
  Matrix s;
  if (center) {
    const Matrix xc = x_all.rowwise() - x_all.colwise().mean();
    s = xc.transpose() * xc / m;
  } else {
    s = x_all.transpose() * x_all / m;
  }
  return 0.5 * (s + s.transpose());
}

double taper_weight(Eigen::Index distance, int bandwidth) {
  const double d = static_cast<double>(distance < 0 ? -distance : distance);
  if (bandwidth <= 0) return d == 0.0 ? 1.0 : 0.0;
  const double k = static_cast<double>(bandwidth);
  if (d <= 0.5 * k) return 1.0;
  if (d >= k) return 0.0;
  return 2.0 - 2.0 * d / k;
}

int taper_bandwidth(Eigen::Index rows, const SparseCovConfig& cfg) {
  cfg.validate();
  if (cfg.bandwidth_override) return *cfg.bandwidth_override;
  return static_cast<int>(std::lround(std::pow(static_cast<double>(rows), 1.0 / (2.0 * cfg.alpha + 1.0))));
}

Matrix sparse_cov(const Matrix& x_all, const SparseCovConfig& cfg) {
  const int k = taper_bandwidth(x_all.rows(), cfg);
  Matrix s = sample_cov(x_all);
  for (Eigen::Index j = 0; j < s.cols(); ++j)
    for (Eigen::Index i = 0; i < s.rows(); ++i) s(i, j) *= taper_weight(i - j, k);
  return pd_repair(s, cfg.eig_floor);
}

Matrix scaled_identity_cov(const Matrix& sigma_hat) {
  require(is_symmetric(sigma_hat), "scaled_identity_cov: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(sigma_hat, Eigen::EigenvaluesOnly);
  const double alpha = es.eigenvalues().cwiseAbs().maxCoeff();
  return alpha * Matrix::Identity(sigma_hat.rows(), sigma_hat.cols());
}

Matrix pd_repair(const Matrix& a, double floor) {
  require(is_symmetric(a), "pd_repair: matrix is not symmetric");
  require(floor > 0.0, "pd_repair: floor must be > 0");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw FactorizationError("pd_repair: eigendecomposition failed");
  if (es.eigenvalues().minCoeff() >= floor) return a;
  const Vector clipped = es.eigenvalues().cwiseMax(floor);
  const Matrix& v = es.eigenvectors();
  Matrix out = v * clipped.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace advlin
