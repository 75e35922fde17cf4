// advlin command line: run simulation experiments, fit the two-stage
// estimator on a CSV file, or evaluate the risk of a coefficient vector.
#include "advlin/estimators.hpp"
#include "advlin/experiments.hpp"
#include "advlin/io.hpp"
#include "advlin/risk.hpp"
#include "advlin/solver.hpp"
#include "advlin/two_stage.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

void print_vector(const char* key, const advlin::Vector& v) {
  std::cout << key << " =";
  for (Eigen::Index i = 0; i < v.size(); ++i) std::cout << ' ' << advlin::format_double(v(i));
  std::cout << '\n';
}

void print_value(const char* key, double v) { std::cout << key << " = " << advlin::format_double(v) << '\n'; }

void print_solution(const advlin::RobustSolution& sol) {
  std::cout << "regime = " << advlin::to_string(sol.regime) << '\n';
  if (sol.lambda_star.is_infinite()) {
    std::cout << "lambda_star = inf\n";
  } else {
    print_value("lambda_star", sol.lambda_star.value());
  }
  print_vector("theta", sol.theta);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarially robust linear regression"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Run a simulation experiment and write CSV files");
  std::string experiment;
  advlin::ExperimentConfig cfg;
  int n = 0;
  int p = 0;
  int reps = 0;
  std::vector<double> delta_grid;
  std::string out_dir = ".";
  run->add_option("experiment", experiment, "Experiment name")
      ->required()
      ->check(CLI::IsMember(advlin::experiment_names()));
  auto* n_opt = run->add_option("--n", n, "Sample size (Monte Carlo draws for fig1)");
  auto* p_opt = run->add_option("--p", p, "Dimension");
  auto* reps_opt = run->add_option("--reps", reps, "Replicates");
  auto* grid_opt = run->add_option("--delta-grid", delta_grid, "Comma separated attack budgets")->delimiter(',');
  run->add_option("--seed", cfg.seed, "Master seed")->capture_default_str();
  run->add_flag("--full-scale", cfg.full_scale, "Use the large replicate counts");
  run->add_option("--threads", cfg.threads, "Worker threads (0: all cores)");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit the two-stage estimator on a CSV data file");
  std::string data_path;
  double delta = 0.0;
  std::string first_stage = "ols";
  std::string cov = "sample";
  double alpha = 0.2;
  std::uint64_t lasso_seed = advlin::kDefaultMasterSeed;
  fit_cmd->add_option("--data", data_path, "CSV file, y in the first column")->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--delta", delta, "Attack budget")->required()->check(CLI::NonNegativeNumber);
  fit_cmd->add_option("--first-stage", first_stage, "Coefficient estimator")
      ->check(CLI::IsMember({"ols", "lasso"}))
      ->capture_default_str();
  fit_cmd->add_option("--cov", cov, "Covariance estimator")
      ->check(CLI::IsMember({"sample", "sparse", "identity"}))
      ->capture_default_str();
  fit_cmd->add_option("--alpha", alpha, "Decay exponent for the sparse covariance estimator")->capture_default_str();
  fit_cmd->add_option("--seed", lasso_seed, "Seed for cross-validation folds")->capture_default_str();

  // risk
  auto* risk_cmd = app.add_subcommand("risk", "Adversarial risk of a coefficient vector under a model");
  std::string theta_path;
  std::string model_path;
  double risk_delta = 0.0;
  risk_cmd->add_option("--theta", theta_path, "File with the coefficient vector")->required()->check(CLI::ExistingFile);
  risk_cmd->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  risk_cmd->add_option("--delta", risk_delta, "Attack budget")->required()->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (*n_opt) cfg.n = n;
      if (*p_opt) cfg.p = p;
      if (*reps_opt) cfg.reps = reps;
      if (*grid_opt) cfg.delta_grid = delta_grid;
      const advlin::ExperimentResult result = advlin::run_experiment(experiment, cfg);
      advlin::write_experiment(result, out_dir);
      std::cout << "wrote " << result.rows.size() << " rows to " << out_dir << '/' << experiment
                << "_replicates.csv and " << experiment << "_summary.csv\n";
    } else if (*fit_cmd) {
      const advlin::Dataset data = advlin::read_dataset_csv(data_path);
      advlin::FirstStage fs = first_stage == "ols" ? advlin::ols(data)
                                                   : advlin::lasso_cv(data, advlin::LassoConfig{}, lasso_seed);
      if (cov == "sparse") {
        advlin::SparseCovConfig sc;
        sc.alpha = alpha;
        fs = fs.with_sigma(advlin::sparse_cov(data.all_rows(), sc));
      } else if (cov == "identity") {
        fs = fs.with_sigma(advlin::scaled_identity_cov(fs.sigma_hat()));
      }
      const advlin::RobustSolution sol = advlin::fit(fs, delta);
      print_vector("theta0_hat", fs.theta0_hat());
      print_value("noise_var_hat", fs.noise_var_hat());
      if (fs.theta0_hat().squaredNorm() > 0.0) {
        const advlin::Thresholds th = advlin::thresholds(fs.theta0_hat(), fs.sigma_hat());
        print_value("delta1", th.delta1);
        print_value("delta2", th.delta2);
      }
      print_solution(sol);
      print_value("empirical_risk", advlin::empirical_risk(sol.theta, fs, delta));
    } else if (*risk_cmd) {
      const advlin::ModelSpec model = advlin::read_model(model_path);
      const advlin::Vector theta = advlin::read_vector(theta_path);
      if (theta.size() != model.dim()) throw advlin::ContractViolation("theta length does not match the model");
      print_value("adversarial_risk", advlin::adversarial_risk(theta, model, risk_delta));
      print_value("standard_risk", advlin::standard_risk(theta, model));
      print_value("prediction_risk", advlin::adversarial_prediction_risk(theta, model, risk_delta));
      const advlin::RobustSolution best = advlin::solve(model.theta0(), model.sigma(), risk_delta);
      print_value("optimal_risk", advlin::adversarial_risk(best.theta, model, risk_delta));
      print_solution(best);
    }
  } catch (const std::exception& e) {
    std::cerr << "advlin: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
