// First-stage estimators of (theta0, sigma, noise_var).
#pragma once

#include "advlin/core.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace advlin {

/// Rule for picking the penalty from the cross-validation curve.
enum class LambdaRule {
  MinError,          // smallest mean validation error
  OneStandardError,  // largest lambda within one standard error of the minimum
};

struct LassoConfig {
  int n_lambda = 100;
  double lambda_min_ratio = 1e-3;
  int n_folds = 10;
  double cd_tol = 1e-8;  // stop when max_j c_j dbeta_j^2 <= cd_tol * |y|^2 / n
  int cd_max_iter = 100000;
  bool standardize = true;
  LambdaRule rule = LambdaRule::OneStandardError;

  void validate() const;
};

struct SparseCovConfig {
  double alpha = 0.2;
  std::optional<int> bandwidth_override;
  double eig_floor = 1e-6;

  void validate() const;
};

/// Least squares with (1/n) X'X covariance and RSS/(n - p) noise estimate.
/// Requires n > p and a full-rank design; otherwise RankError.
[[nodiscard]] FirstStage ols(const Dataset& data);

/// Minimum-norm least squares; defined for any n, p (used when n <= p).
[[nodiscard]] FirstStage min_norm_ls(const Dataset& data);

/// Solution path of (1/2n)|y - X b|^2 + lambda sum_j w_j |b_j| by cyclic
/// coordinate descent with warm starts. With standardize on, w_j is the
/// root mean square of column j. Column k of the result belongs to lambdas[k],
/// which must be decreasing.
[[nodiscard]] Matrix lasso_path(const Matrix& x, const Vector& y, const std::vector<double>& lambdas,
                                const LassoConfig& cfg);

/// Log-spaced decreasing grid from lambda_max, the smallest penalty giving b = 0.
[[nodiscard]] std::vector<double> lasso_lambda_grid(const Matrix& x, const Vector& y, const LassoConfig& cfg);

struct LassoCvResult {
  std::vector<double> lambdas;
  std::vector<double> cv_mean;  // mean validation squared error per lambda
  std::vector<double> cv_se;    // its standard error across folds
  std::size_t index_min = 0;
  std::size_t index_1se = 0;
  double lambda = 0.0;  // selected by cfg.rule
  Vector coef;          // refit on all labeled rows at `lambda`
};

[[nodiscard]] LassoCvResult lasso_cv_path(const Matrix& x, const Vector& y, const LassoConfig& cfg,
                                          std::uint64_t seed);

/// K-fold cross-validated lasso. Folds come from a shuffle seeded by `seed`.
/// Noise variance uses RSS/(n - nnz), floored at one degree of freedom.
[[nodiscard]] FirstStage lasso_cv(const Dataset& data, const LassoConfig& cfg, std::uint64_t seed);

/// (1/m) X'X over the m rows given, optionally after removing column means.
[[nodiscard]] Matrix sample_cov(const Matrix& x_all, bool center = false);

/// Flat-top linear taper: 1 up to k/2, 0 from k on, linear in between.
[[nodiscard]] double taper_weight(Eigen::Index distance, int bandwidth);

/// round(m^{1/(2 alpha + 1)}) for m rows, or the override.
[[nodiscard]] int taper_bandwidth(Eigen::Index rows, const SparseCovConfig& cfg);

/// Tapered sample covariance, followed by pd_repair with cfg.eig_floor.
[[nodiscard]] Matrix sparse_cov(const Matrix& x_all, const SparseCovConfig& cfg);

/// |sigma_hat| I with the spectral norm.
[[nodiscard]] Matrix scaled_identity_cov(const Matrix& sigma_hat);

/// Clips eigenvalues below `floor` up to `floor`. Matrices whose spectrum is
/// already above the floor are returned unchanged.
[[nodiscard]] Matrix pd_repair(const Matrix& a, double floor);

}  // namespace advlin
