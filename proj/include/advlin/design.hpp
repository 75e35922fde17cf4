// Simulation designs: ground-truth models and Gaussian samples from them.
#pragma once

#include "advlin/core.hpp"

#include <cstdint>
#include <string>
#include <utility>

namespace advlin {

enum class CovKind {
  DenseCov,     // diag 2r + |tau_i| with tau_i ~ N(0, 1), off-diagonal r
  SparseCov,    // diag 1, off-diagonal r |i - j|^{-alpha - 1}
  IdentityCov,
  Custom,       // DesignSpec::sigma
};

enum class Theta0Kind {
  UnitSphere,     // uniform on the unit sphere
  SparseUniform,  // first `sparsity` entries equal to 1/sqrt(sparsity)
  Fixed,          // DesignSpec::theta0
};

struct DesignSpec {
  CovKind kind = CovKind::DenseCov;
  int p = 10;
  double r = 0.1;
  double alpha = 0.2;
  Theta0Kind theta0_kind = Theta0Kind::UnitSphere;
  int sparsity = 10;
  Vector theta0;  // Fixed only
  Matrix sigma;   // Custom only
  double noise_var = 1.0;
  std::uint64_t seed = 0;  // drives tau and the sphere draw

  void validate() const;
  /// Short tag for output files, e.g. "dense_r0.1_p50".
  [[nodiscard]] std::string label() const;
};

/// Builds (theta0, sigma, noise_var). DenseCov redraws tau until the smallest
/// eigenvalue exceeds 1e-8, at most 100 times, then raises DesignError.
[[nodiscard]] ModelSpec make_model(const DesignSpec& design);

/// n labeled and n_unlabeled unlabeled rows from the model. The labeled part
/// does not depend on n_unlabeled.
[[nodiscard]] Dataset sample_dataset(const ModelSpec& model, Eigen::Index n, Eigen::Index n_unlabeled,
                                     std::uint64_t seed);

[[nodiscard]] std::pair<ModelSpec, Dataset> generate(const DesignSpec& design, Eigen::Index n,
                                                     Eigen::Index n_unlabeled, std::uint64_t seed);

}  // namespace advlin
