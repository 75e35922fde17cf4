#include "advlin/experiments.hpp"

#include "advlin/baselines.hpp"
#include "advlin/design.hpp"
#include "advlin/estimators.hpp"
#include "advlin/inference.hpp"
#include "advlin/io.hpp"
#include "advlin/random.hpp"
#include "advlin/risk.hpp"
#include "advlin/solver.hpp"
#include "advlin/two_stage.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

namespace advlin {
namespace {

constexpr double kCovFloor = 1e-6;

struct Plan {
  int reps;
  std::vector<double> deltas;
};

std::vector<double> grid(double from, double to, double step) {
  std::vector<double> out;
  const int count = static_cast<int>(std::lround((to - from) / step)) + 1;
  for (int k = 0; k < count; ++k) out.push_back(std::round((from + k * step) * 1e12) / 1e12);
  return out;
}

Plan make_plan(const ExperimentConfig& cfg, int desk_reps, int full_reps, std::vector<double> default_deltas) {
  Plan plan;
  plan.reps = cfg.reps.value_or(cfg.full_scale ? full_reps : desk_reps);
  plan.deltas = cfg.delta_grid.value_or(std::move(default_deltas));
  if (plan.reps < 1) throw ConfigError("reps must be >= 1");
  if (plan.deltas.empty()) throw ConfigError("delta grid is empty");
  for (double d : plan.deltas)
    if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("delta values must be finite and >= 0");
  if (cfg.n && *cfg.n < 1) throw ConfigError("n must be >= 1");
  if (cfg.p && *cfg.p < 1) throw ConfigError("p must be >= 1");
  return plan;
}

using ReplicateFn = std::function<void(int, std::vector<ReplicateRow>&)>;

// Runs fn for every replicate on a small thread pool and concatenates the rows
// in replicate order.
std::vector<ReplicateRow> run_replicates(int reps, int threads, const ReplicateFn& fn) {
  std::vector<std::vector<ReplicateRow>> per(static_cast<std::size_t>(reps));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(reps));
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k = next++; k < reps; k = next++) {
      try {
        fn(k, per[static_cast<std::size_t>(k)]);
      } catch (...) {
        errors[static_cast<std::size_t>(k)] = std::current_exception();
      }
    }
  };
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp(n_threads, 1, reps);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<ReplicateRow> rows;
  for (auto& chunk : per)
    for (auto& r : chunk) rows.push_back(std::move(r));
  return rows;
}

std::uint64_t replicate_seed(const ExperimentConfig& cfg, const std::string& name, int rep) {
  return derive_seed(cfg.seed, name, {static_cast<std::uint64_t>(rep)});
}

double regime_code(Regime r) {
  switch (r) {
    case Regime::AtTheta0: return 0.0;
    case Regime::Interior: return 1.0;
    case Regime::AtZero: return 2.0;
  }
  return -1.0;
}

// -1 stands for an infinite shrinkage level so every metric stays finite.
double lambda_value(const RobustSolution& s) {
  return s.lambda_star.is_infinite() ? -1.0 : s.lambda_star.value();
}

// Closed form of R0(theta*, delta) for sigma = I.
double identity_optimal_risk(double delta, double theta0_norm_sq) {
  if (delta <= kC0) return delta * delta * theta0_norm_sq;
  if (delta >= 1.0 / kC0) return theta0_norm_sq;
  return theta0_norm_sq * delta * delta * (1.0 - kC0 * kC0) / (delta * delta + 1.0 - 2.0 * delta * kC0);
}

struct RowWriter {
  std::vector<ReplicateRow>& out;
  std::string design;
  int n;
  int p;
  int rep;

  void add(const std::string& estimator, double delta, std::vector<double> values) {
    out.push_back(ReplicateRow{design, n, p, estimator, delta, rep, std::move(values)});
  }
};

// adv_risk, std_risk, excess relative to the optimum.
std::vector<double> risk_triplet(const Vector& theta, const ModelSpec& model, double delta, double optimum) {
  const double adv = adversarial_risk(theta, model, delta);
  return {adv, standard_risk(theta, model), adv - optimum};
}

FirstStage known_sigma(const FirstStage& fs, const ModelSpec& model) { return fs.with_sigma(model.sigma()); }

// ---------------------------------------------------------------------------

ExperimentResult run_fig1(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 1, 1, grid(0.2, 1.6, 0.2));
  const int p = cfg.p.value_or(10);
  const int n_mc = cfg.n.value_or(10000);

  DesignSpec design;
  design.kind = CovKind::IdentityCov;
  design.p = p;
  design.seed = derive_seed(cfg.seed, "fig1", {});
  const ModelSpec model = make_model(design);
  const ShrinkagePath path(model.theta0(), model.sigma());
  const double norm_sq = model.theta0().squaredNorm();

  ExperimentResult res{"fig1", {"closed_form", "three_piece", "mc_mean", "mc_se", "std_risk", "lambda_star", "regime"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    RowWriter w{out, design.label(), n_mc, p, rep};
    const std::uint64_t seed = replicate_seed(cfg, "fig1", rep);
    for (std::size_t k = 0; k < plan.deltas.size(); ++k) {
      const double delta = plan.deltas[k];
      const RobustSolution sol = path.solve(delta);
      const MonteCarloEstimate mc = monte_carlo_risk(sol.theta, model, delta, n_mc, derive_seed(seed, k));
      w.add("theta_star", delta,
            {adversarial_risk(sol.theta, model, delta), identity_optimal_risk(delta, norm_sq), mc.mean, mc.std_error,
             standard_risk(sol.theta, model), lambda_value(sol), regime_code(sol.regime)});
    }
  });
  return res;
}

ExperimentResult run_fig2(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, grid(0.1, 2.0, 0.1));
  const int p = cfg.p.value_or(10);
  const int n = cfg.n.value_or(1000);

  DesignSpec design;
  design.kind = CovKind::IdentityCov;
  design.p = p;
  design.seed = derive_seed(cfg.seed, "fig2", {});
  const ModelSpec model = make_model(design);
  const ShrinkagePath path(model.theta0(), model.sigma());
  std::vector<Vector> stars;
  for (double d : plan.deltas) stars.push_back(path.solve(d).theta);

  ExperimentResult res{"fig2",
                       {"gap1", "gap2", "e1_sigma", "e1_theta0", "e2_sigma", "e2_theta0", "c_sigma", "c_theta0"},
                       {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    RowWriter w{out, design.label(), n, p, rep};
    const Dataset data = sample_dataset(model, n, 0, replicate_seed(cfg, "fig2", rep));
    const FirstStage fs = ols(data);
    for (std::size_t k = 0; k < plan.deltas.size(); ++k) {
      const double delta = plan.deltas[k];
      const Vector theta_hat = fit(fs, delta).theta;
      const double emp = empirical_risk(theta_hat, fs, delta);
      const ErrorTerms e = error_decomposition(fs, model, delta);
      w.add("ols", delta,
            {adversarial_risk(theta_hat, model, delta) - emp, adversarial_risk(stars[k], model, delta) - emp,
             e.e1_sigma, e.e1_theta0, e.e2_sigma, e.e2_theta0, e.c_sigma, e.c_theta0});
    }
  });
  return res;
}

ExperimentResult run_coverage(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 1000, grid(0.25, 2.5, 0.25));
  if (cfg.p && *cfg.p != 2) throw ConfigError("coverage: the design has p = 2");
  const int n = cfg.n.value_or(1000);

  DesignSpec design;
  design.kind = CovKind::Custom;
  design.p = 2;
  design.sigma = (Matrix(2, 2) << 1.0, 0.5, 0.5, 2.0).finished();
  design.theta0_kind = Theta0Kind::Fixed;
  design.theta0 = Vector::LinSpaced(2, 1.0, 2.0);
  const ModelSpec model = make_model(design);
  const ShrinkagePath path(model.theta0(), model.sigma());
  std::vector<Vector> stars;
  for (double d : plan.deltas) stars.push_back(path.solve(d).theta);

  ExperimentResult res{"coverage",
                       {"cover_1", "cover_2", "theta_hat_1", "theta_hat_2", "theta_star_1", "theta_star_2", "se_1",
                        "se_2", "regime_hat"},
                       {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    RowWriter w{out, "custom_p2", n, 2, rep};
    const Dataset data = sample_dataset(model, n, 0, replicate_seed(cfg, "coverage", rep));
    const FirstStage fs = ols(data);
    for (std::size_t k = 0; k < plan.deltas.size(); ++k) {
      const double delta = plan.deltas[k];
      const RobustSolution sol = fit(fs, delta);
      const Matrix cov = plugin_covariance(fs, sol, data);
      const auto ci = confidence_intervals(sol.theta, cov, 0.95);
      const Vector& star = stars[k];
      w.add("ols", delta,
            {ci[0].contains(star(0)) ? 1.0 : 0.0, ci[1].contains(star(1)) ? 1.0 : 0.0, sol.theta(0), sol.theta(1),
             star(0), star(1), std::sqrt(cov(0, 0)), std::sqrt(cov(1, 1)), regime_code(sol.regime)});
    }
  });
  return res;
}

ExperimentResult run_table1(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, {0.5, 0.8, 0.9});
  const int p = cfg.p.value_or(50);
  const int n = cfg.n.value_or(300);

  ExperimentResult res{"table1", {"adv_risk", "std_risk", "excess"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    const std::uint64_t seed = replicate_seed(cfg, "table1", rep);
    DesignSpec design;
    design.kind = CovKind::DenseCov;
    design.p = p;
    design.r = 0.1;
    design.seed = derive_seed(seed, 1);
    const ModelSpec model = make_model(design);
    const Dataset data = sample_dataset(model, n, 0, derive_seed(seed, 2));
    const FirstStage fs_ols = ols(data);
    const FirstStage fs_lasso = lasso_cv(data, LassoConfig{}, derive_seed(seed, 3));
    const ShrinkagePath path(model.theta0(), model.sigma());

    RowWriter w{out, design.label(), n, p, rep};
    for (double delta : plan.deltas) {
      const Vector star = path.solve(delta).theta;
      const double opt = adversarial_risk(star, model, delta);
      w.add("true", delta, risk_triplet(star, model, delta, opt));
      w.add("ols", delta, risk_triplet(fit(fs_ols, delta).theta, model, delta, opt));
      w.add("lasso", delta, risk_triplet(fit(fs_lasso, delta).theta, model, delta, opt));
      w.add("theta0", delta, risk_triplet(model.theta0(), model, delta, opt));
      w.add("zero", delta, risk_triplet(Vector::Zero(p), model, delta, opt));
    }
  });
  return res;
}

ExperimentResult run_table2(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, {0.5, 1.0, 2.0, 3.0});
  const int p = cfg.p.value_or(300);
  const int n = cfg.n.value_or(200);

  ExperimentResult res{"table2", {"adv_risk", "std_risk", "excess"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    const std::uint64_t seed = replicate_seed(cfg, "table2", rep);
    DesignSpec design;
    design.kind = CovKind::DenseCov;
    design.p = p;
    design.r = 0.1;
    design.theta0_kind = Theta0Kind::SparseUniform;
    design.sparsity = std::min(10, p);
    design.seed = derive_seed(seed, 1);
    const ModelSpec model = make_model(design);
    const Dataset data = sample_dataset(model, n, 0, derive_seed(seed, 2));

    // Least squares is not identified for n <= p; the minimum-norm solution stands in.
    const FirstStage ls = n > p ? ols(data) : min_norm_ls(data);
    const FirstStage lasso = lasso_cv(data, LassoConfig{}, derive_seed(seed, 3));
    const Matrix sigma_hat = pd_repair(sample_cov(data.all_rows()), kCovFloor);
    const std::string ls_tag = n > p ? "ols" : "ols_minnorm";
    const ShrinkagePath path(model.theta0(), model.sigma());

    RowWriter w{out, design.label(), n, p, rep};
    for (double delta : plan.deltas) {
      const Vector star = path.solve(delta).theta;
      const double opt = adversarial_risk(star, model, delta);
      w.add("true", delta, risk_triplet(star, model, delta, opt));
      w.add(ls_tag + "_known", delta, risk_triplet(fit(known_sigma(ls, model), delta).theta, model, delta, opt));
      w.add("lasso_known", delta, risk_triplet(fit(known_sigma(lasso, model), delta).theta, model, delta, opt));
      w.add(ls_tag + "_unknown", delta, risk_triplet(fit(ls.with_sigma(sigma_hat), delta).theta, model, delta, opt));
      w.add("lasso_unknown", delta,
            risk_triplet(fit(lasso.with_sigma(sigma_hat), delta).theta, model, delta, opt));
      w.add("theta0", delta, risk_triplet(model.theta0(), model, delta, opt));
      w.add("zero", delta, risk_triplet(Vector::Zero(p), model, delta, opt));
    }
  });
  return res;
}

double spectral_norm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

ExperimentResult run_table3(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, {2.0});
  const int p = cfg.p.value_or(300);
  const int n = cfg.n.value_or(200);

  ExperimentResult res{"table3", {"adv_risk", "excess", "spectral_err"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    const std::uint64_t seed = replicate_seed(cfg, "table3", rep);
    for (CovKind kind : {CovKind::DenseCov, CovKind::SparseCov}) {
      DesignSpec design;
      design.kind = kind;
      design.p = p;
      design.r = 0.6;
      design.alpha = 0.2;
      design.seed = derive_seed(seed, kind == CovKind::DenseCov ? 1 : 2);
      const ModelSpec model = make_model(design);
      const Dataset data = sample_dataset(model, n, 0, derive_seed(seed, kind == CovKind::DenseCov ? 3 : 4));
      const Matrix raw = sample_cov(data.all_rows());
      const Matrix s_sample = pd_repair(raw, kCovFloor);
      SparseCovConfig sc;
      sc.alpha = design.alpha;
      const Matrix s_sparse = sparse_cov(data.all_rows(), sc);
      const ShrinkagePath truth(model.theta0(), model.sigma());
      const ShrinkagePath with_sample(model.theta0(), s_sample);
      const ShrinkagePath with_sparse(model.theta0(), s_sparse);
      const double err_sample = spectral_norm(raw - model.sigma());
      const double err_sparse = spectral_norm(s_sparse - model.sigma());

      RowWriter w{out, design.label(), n, p, rep};
      for (double delta : plan.deltas) {
        const Vector star = truth.solve(delta).theta;
        const double opt = adversarial_risk(star, model, delta);
        auto row = [&](const Vector& theta, double err) {
          const double adv = adversarial_risk(theta, model, delta);
          return std::vector<double>{adv, adv - opt, err};
        };
        w.add("true", delta, row(star, 0.0));
        w.add("sample_cov", delta, row(with_sample.solve(delta).theta, err_sample));
        w.add("sparse_cov", delta, row(with_sparse.solve(delta).theta, err_sparse));
        w.add("theta0", delta, row(model.theta0(), 0.0));
      }
    }
  });
  return res;
}

ExperimentResult run_baseline_grid(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, {0.5, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.5, 1.8, 2.0});
  const int p = cfg.p.value_or(10);
  const int n = cfg.n.value_or(1000);
  const std::vector<double> r_values = {0.01, 0.02, 0.1, 0.2};

  ExperimentResult res{"baseline_grid", {"adv_risk", "std_risk", "excess_adv", "excess_std", "converged"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    const std::uint64_t seed = replicate_seed(cfg, "baseline_grid", rep);
    for (std::size_t ri = 0; ri < r_values.size(); ++ri) {
      DesignSpec design;
      design.kind = CovKind::DenseCov;
      design.p = p;
      design.r = r_values[ri];
      design.seed = derive_seed(seed, 10 * ri + 1);
      const ModelSpec model = make_model(design);
      const Dataset data = sample_dataset(model, n, 0, derive_seed(seed, 10 * ri + 2));
      const FirstStage emp = ols(data);
      const FirstStage mag = emp.with_sigma(scaled_identity_cov(emp.sigma_hat()));
      const ShrinkagePath path(model.theta0(), model.sigma());
      const RobustSolution star0 = path.solve(0.0);

      RowWriter w{out, design.label(), n, p, rep};
      for (double delta : plan.deltas) {
        const Vector star = path.solve(delta).theta;
        const double opt = adversarial_risk(star, model, delta);
        const double opt0 = standard_risk(star0.theta, model);
        auto row = [&](const Vector& theta, bool converged) {
          const double adv = adversarial_risk(theta, model, delta);
          const double st = standard_risk(theta, model);
          return std::vector<double>{adv, st, adv - opt, st - opt0, converged ? 1.0 : 0.0};
        };
        const AdvTrainResult adv = adv_train_y(data, delta);
        w.add("emp", delta, row(fit(emp, delta).theta, true));
        w.add("mag", delta, row(fit(mag, delta).theta, true));
        w.add("adv_train_y", delta, row(adv.theta, adv.converged));
        w.add("true", delta, row(star, true));
        w.add("theta0", delta, row(model.theta0(), true));
        w.add("zero", delta, row(Vector::Zero(p), true));
      }
    }
  });
  return res;
}

ExperimentResult run_rate_scan(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, {1.0});
  const int p = cfg.p.value_or(10);
  const std::vector<int> sizes = cfg.n ? std::vector<int>{*cfg.n} : std::vector<int>{500, 1000, 2000, 4000};

  ExperimentResult res{"rate_scan", {"est_err_sq", "excess", "regime_hat", "regime_star"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    const std::uint64_t seed = replicate_seed(cfg, "rate_scan", rep);
    DesignSpec design;
    design.kind = CovKind::DenseCov;
    design.p = p;
    design.r = 0.1;
    design.seed = derive_seed(seed, 1);
    const ModelSpec model = make_model(design);
    const ShrinkagePath path(model.theta0(), model.sigma());
    for (int n : sizes) {
      const Dataset data = sample_dataset(model, n, 0, derive_seed(seed, 100 + static_cast<std::uint64_t>(n)));
      const FirstStage fs = ols(data);
      RowWriter w{out, design.label(), n, p, rep};
      for (double delta : plan.deltas) {
        const RobustSolution star = path.solve(delta);
        const RobustSolution est = fit(fs, delta);
        const double excess =
            adversarial_risk(est.theta, model, delta) - adversarial_risk(star.theta, model, delta);
        w.add("ols", delta,
              {(est.theta - star.theta).squaredNorm(), excess, regime_code(est.regime), regime_code(star.regime)});
      }
    }
  });
  return res;
}

ExperimentResult run_unlabeled(const ExperimentConfig& cfg) {
  const Plan plan = make_plan(cfg, 100, 500, {1.0});
  const int p = cfg.p.value_or(300);
  const int n = cfg.n.value_or(200);

  ExperimentResult res{"unlabeled", {"est_err_sq", "cov_err_sq", "excess"}, {}};
  res.rows = run_replicates(plan.reps, cfg.threads, [&](int rep, std::vector<ReplicateRow>& out) {
    const std::uint64_t seed = replicate_seed(cfg, "unlabeled", rep);
    DesignSpec design;
    design.kind = CovKind::DenseCov;
    design.p = p;
    design.r = 0.1;
    design.theta0_kind = Theta0Kind::SparseUniform;
    design.sparsity = std::min(10, p);
    design.seed = derive_seed(seed, 1);
    const ModelSpec model = make_model(design);
    const Dataset data = sample_dataset(model, n, n, derive_seed(seed, 2));
    const Dataset labeled(data.x(), data.y());
    const FirstStage lasso = lasso_cv(labeled, LassoConfig{}, derive_seed(seed, 3));
    const Matrix s_labeled = pd_repair(sample_cov(data.x()), kCovFloor);
    const Matrix s_all = pd_repair(sample_cov(data.all_rows()), kCovFloor);
    const ShrinkagePath path(model.theta0(), model.sigma());

    RowWriter w{out, design.label(), n, p, rep};
    for (double delta : plan.deltas) {
      const Vector star = path.solve(delta).theta;
      const double opt = adversarial_risk(star, model, delta);
      const Vector known = fit(lasso.with_sigma(model.sigma()), delta).theta;
      auto row = [&](const Vector& theta) {
        return std::vector<double>{(theta - star).squaredNorm(), (theta - known).squaredNorm(),
                                   adversarial_risk(theta, model, delta) - opt};
      };
      w.add("known_sigma", delta, row(known));
      w.add("labeled_only", delta, row(fit(lasso.with_sigma(s_labeled), delta).theta));
      w.add("with_unlabeled", delta, row(fit(lasso.with_sigma(s_all), delta).theta));
    }
  });
  return res;
}

using Runner = ExperimentResult (*)(const ExperimentConfig&);

const std::vector<std::pair<std::string, Runner>>& registry() {
  static const std::vector<std::pair<std::string, Runner>> r = {
      {"fig1", run_fig1},         {"fig2", run_fig2},     {"coverage", run_coverage},
      {"table1", run_table1},     {"table2", run_table2}, {"table3", run_table3},
      {"baseline_grid", run_baseline_grid}, {"rate_scan", run_rate_scan}, {"unlabeled", run_unlabeled},
  };
  return r;
}

void write_header_prefix(std::ostream& out) { out << "experiment,design,n,p,estimator,delta"; }

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [name, fn] : registry()) v.push_back(name);
    return v;
  }();
  return names;
}

ExperimentResult run_experiment(const std::string& name, const ExperimentConfig& cfg) {
  for (const auto& [key, fn] : registry())
    if (key == name) return fn(cfg);
  throw ConfigError("unknown experiment '" + name + "'");
}

std::size_t metric_index(const std::vector<std::string>& metrics, const std::string& metric) {
  const auto it = std::find(metrics.begin(), metrics.end(), metric);
  if (it == metrics.end()) throw ConfigError("unknown metric '" + metric + "'");
  return static_cast<std::size_t>(it - metrics.begin());
}

SummaryTable summarize(const ExperimentResult& result) {
  SummaryTable table{result.name, result.metrics, {}};
  using Key = std::tuple<std::string, int, int, std::string, double>;
  std::map<Key, std::size_t> index;
  std::vector<std::vector<const ReplicateRow*>> members;
  for (const auto& row : result.rows) {
    const Key key{row.design, row.n, row.p, row.estimator, row.delta};
    auto [it, inserted] = index.emplace(key, table.rows.size());
    if (inserted) {
      table.rows.push_back(SummaryRow{row.design, row.n, row.p, row.estimator, row.delta, 0, {}, {}});
      members.emplace_back();
    }
    members[it->second].push_back(&row);
  }

  const std::size_t m = result.metrics.size();
  for (std::size_t g = 0; g < table.rows.size(); ++g) {
    SummaryRow& s = table.rows[g];
    const auto& rows = members[g];
    s.count = static_cast<int>(rows.size());
    s.mean.assign(m, 0.0);
    s.sd.assign(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double mean = 0.0;
      for (const auto* r : rows) mean += r->values[j];
      mean /= static_cast<double>(rows.size());
      double ss = 0.0;
      for (const auto* r : rows) ss += (r->values[j] - mean) * (r->values[j] - mean);
      s.mean[j] = mean;
      s.sd[j] = rows.size() > 1 ? std::sqrt(ss / static_cast<double>(rows.size() - 1)) : 0.0;
    }
  }
  return table;
}

void write_replicates_csv(std::ostream& out, const ExperimentResult& result) {
  write_header_prefix(out);
  out << ",replicate";
  for (const auto& m : result.metrics) out << ',' << m;
  out << '\n';
  for (const auto& r : result.rows) {
    out << result.name << ',' << r.design << ',' << r.n << ',' << r.p << ',' << r.estimator << ','
        << format_double(r.delta) << ',' << r.replicate;
    for (double v : r.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SummaryTable& table) {
  write_header_prefix(out);
  out << ",count";
  for (const auto& m : table.metrics) out << ',' << m << "_mean," << m << "_sd";
  out << '\n';
  for (const auto& r : table.rows) {
    out << table.name << ',' << r.design << ',' << r.n << ',' << r.p << ',' << r.estimator << ','
        << format_double(r.delta) << ',' << r.count;
    for (std::size_t j = 0; j < table.metrics.size(); ++j)
      out << ',' << format_double(r.mean[j]) << ',' << format_double(r.sd[j]);
    out << '\n';
  }
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto open = [&](const std::string& suffix) {
    std::ofstream f(dir / (result.name + suffix));
    if (!f) throw ConfigError("cannot write to " + (dir / (result.name + suffix)).string());
    return f;
  };
  {
    auto f = open("_replicates.csv");
    write_replicates_csv(f, result);
  }
  auto f = open("_summary.csv");
  write_summary_csv(f, summarize(result));
}

}  // namespace advlin
