#include "advlin/design.hpp"

#include "advlin/random.hpp"

#include <cmath>
#include <sstream>

namespace advlin {
namespace {

constexpr int kMaxRedraws = 100;
constexpr double kMinEigen = 1e-8;

double min_eigenvalue(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix dense_sigma(const DesignSpec& d) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    Rng rng(derive_seed(d.seed, "sigma", {static_cast<std::uint64_t>(attempt)}));
    const Vector tau = standard_normal_vector(rng, d.p);
    Matrix s = Matrix::Constant(d.p, d.p, d.r);
    s.diagonal() = (2.0 * d.r + tau.array().abs()).matrix();
    if (min_eigenvalue(s) > kMinEigen) return s;
  }
  throw DesignError("make_model: no positive definite dense covariance after 100 draws");
}

Matrix sparse_sigma(const DesignSpec& d) {
  Matrix s(d.p, d.p);
  for (int i = 0; i < d.p; ++i)
    for (int j = 0; j < d.p; ++j)
      s(i, j) = i == j ? 1.0 : d.r * std::pow(static_cast<double>(std::abs(i - j)), -d.alpha - 1.0);
  if (!(min_eigenvalue(s) > kMinEigen)) throw DesignError("make_model: sparse covariance is not positive definite");
  return s;
}

}  // namespace

void DesignSpec::validate() const {
  if (p < 1) throw ConfigError("DesignSpec: p must be >= 1");
  if (!(noise_var >= 0.0)) throw ConfigError("DesignSpec: noise_var must be >= 0");
  if (kind == CovKind::SparseCov && !(alpha > 0.0)) throw ConfigError("DesignSpec: alpha must be > 0");
  if (kind == CovKind::Custom && (sigma.rows() != p || sigma.cols() != p))
    throw ConfigError("DesignSpec: custom sigma must be p x p");
  if (theta0_kind == Theta0Kind::SparseUniform && (sparsity < 1 || sparsity > p))
    throw ConfigError("DesignSpec: sparsity must lie in [1, p]");
  if (theta0_kind == Theta0Kind::Fixed && theta0.size() != p) throw ConfigError("DesignSpec: fixed theta0 must have length p");
}

std::string DesignSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case CovKind::DenseCov: os << "dense_r" << r; break;
    case CovKind::SparseCov: os << "sparse_r" << r << "_a" << alpha; break;
    case CovKind::IdentityCov: os << "identity"; break;
    case CovKind::Custom: os << "custom"; break;
  }
  os << "_p" << p;
  return os.str();
}

ModelSpec make_model(const DesignSpec& design) {
  design.validate();
  Matrix sigma;
  switch (design.kind) {
    case CovKind::DenseCov: sigma = dense_sigma(design); break;
    case CovKind::SparseCov: sigma = sparse_sigma(design); break;
    case CovKind::IdentityCov: sigma = Matrix::Identity(design.p, design.p); break;
    case CovKind::Custom: sigma = design.sigma; break;
  }

  Vector theta0;
  switch (design.theta0_kind) {
    case Theta0Kind::UnitSphere: {
      Rng rng(derive_seed(design.seed, "theta0", {}));
      theta0 = standard_normal_vector(rng, design.p);
      theta0 /= theta0.norm();
      break;
    }
    case Theta0Kind::SparseUniform:
      theta0 = Vector::Zero(design.p);
      theta0.head(design.sparsity).setConstant(1.0 / std::sqrt(static_cast<double>(design.sparsity)));
      break;
    case Theta0Kind::Fixed: theta0 = design.theta0; break;
  }
  return ModelSpec(std::move(theta0), std::move(sigma), design.noise_var);
}

Dataset sample_dataset(const ModelSpec& model, Eigen::Index n, Eigen::Index n_unlabeled, std::uint64_t seed) {
  require(n >= 1, "sample_dataset: n must be >= 1");
  require(n_unlabeled >= 0, "sample_dataset: n_unlabeled must be >= 0");
  const Eigen::LLT<Matrix> llt(model.sigma());
  const Matrix l = llt.matrixL();

  Rng rng(derive_seed(seed, "labeled", {}));
  Matrix x = gaussian_rows(rng, n, l);
  const Vector eps = std::sqrt(model.noise_var()) * standard_normal_vector(rng, n);
  Vector y = x * model.theta0() + eps;
  if (n_unlabeled == 0) return Dataset(std::move(x), std::move(y));

  Rng rng_u(derive_seed(seed, "unlabeled", {}));
  return Dataset(std::move(x), std::move(y), gaussian_rows(rng_u, n_unlabeled, l));
}

std::pair<ModelSpec, Dataset> generate(const DesignSpec& design, Eigen::Index n, Eigen::Index n_unlabeled,
                                       std::uint64_t seed) {
  ModelSpec model = make_model(design);
  Dataset data = sample_dataset(model, n, n_unlabeled, seed);
  return {std::move(model), std::move(data)};
}

}  // namespace advlin
