#include "advlin/risk.hpp"
#include "advlin/solver.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace advlin;
using namespace advlin::testing;

namespace {

double identity_lambda_star(double delta) { return (delta * delta - delta * kC0) / (1.0 - delta * kC0); }

struct Problem {
  Vector theta0;
  Matrix sigma;
};

Problem random_problem(Rng& rng, Eigen::Index p = 5) {
  return {standard_normal_vector(rng, p), random_pd(rng, p)};
}

}  // namespace

TEST_CASE("thresholds examples") {
  const Thresholds id = thresholds(Vector::Unit(3, 1), Matrix::Identity(3, 3));
  CHECK(id.delta1 == doctest::Approx(kC0).epsilon(1e-14));
  CHECK(id.delta2 == doctest::Approx(1.0 / kC0).epsilon(1e-14));
  CHECK(id.delta1 == doctest::Approx(0.797885).epsilon(1e-6));
  CHECK(id.delta2 == doctest::Approx(1.253314).epsilon(1e-6));

  for (double alpha : {0.25, 3.0, 40.0}) {
    const Thresholds t = thresholds(Vector::LinSpaced(4, -1, 2), alpha * Matrix::Identity(4, 4));
    CHECK(t.delta1 == doctest::Approx(kC0 * std::sqrt(alpha)).epsilon(1e-13));
    CHECK(t.delta2 == doctest::Approx(std::sqrt(alpha) / kC0).epsilon(1e-13));
  }

  const Matrix d = Vector::LinSpaced(2, 1, 2).asDiagonal();
  const Thresholds t = thresholds(Vector::LinSpaced(2, 1, 2), d);
  CHECK(t.delta1 == doctest::Approx(kC0 * std::sqrt(5.0 / 3.0)).epsilon(1e-14));
  CHECK(t.delta2 == doctest::Approx(std::sqrt(17.0) / (3.0 * kC0)).epsilon(1e-14));
  CHECK(t.delta1 == doctest::Approx(1.030065).epsilon(1e-6));
  CHECK(t.delta2 == doctest::Approx(1.722516).epsilon(1e-6));

  CHECK_THROWS_AS((void)thresholds(Vector::Zero(3), Matrix::Identity(3, 3)), DegenerateModelError);
}

TEST_CASE("thresholds are ordered") {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const Problem pr = random_problem(rng, 1 + static_cast<Eigen::Index>(rng() % 8));
    const Thresholds t = thresholds(pr.theta0, pr.sigma);
    CHECK(t.delta1 <= t.delta2);
  }
}

TEST_CASE("theta_of_lambda examples") {
  Rng rng(22);
  const Problem pr = random_problem(rng);
  CHECK(theta_of_lambda(pr.theta0, pr.sigma, 0.0) == pr.theta0);
  const Vector t0 = Vector::LinSpaced(3, 1, 3);
  CHECK((theta_of_lambda(t0, Matrix::Identity(3, 3), 1.0) - t0 / 2).norm() <= 1e-15);
  const Matrix d = Vector::LinSpaced(2, 1, 2).asDiagonal();
  const Vector expected = (Vector(2) << 0.5, 2.0 / 3.0).finished();
  CHECK((theta_of_lambda(Vector::Ones(2), d, 1.0) - expected).norm() <= 1e-15);
}

TEST_CASE("g_of_eta examples") {
  Rng rng(23);
  const Problem pr = random_problem(rng);
  const Thresholds t = thresholds(pr.theta0, pr.sigma);
  CHECK(std::abs(g_of_eta(pr.theta0, pr.sigma, t.delta2, 0.0)) <= 1e-15);
  CHECK(g_of_eta(pr.theta0, pr.sigma, 0.5 * t.delta2, 0.0) == doctest::Approx(0.5));

  const Vector t0 = Vector::Unit(4, 2);
  const Matrix id = Matrix::Identity(4, 4);
  CHECK(std::abs(g_of_eta(t0, id, 1.0, 1.0)) <= 1e-14);
  CHECK(g_of_eta(t0, id, 1.0, 0.5) > 0.0);
  CHECK(g_of_eta(t0, id, 1.0, 2.0) < 0.0);
}

TEST_CASE("solve on the identity covariance matches the closed form") {
  const Vector t0 = Vector::Unit(3, 0);
  const Matrix id = Matrix::Identity(3, 3);
  const RobustSolution s = solve(t0, id, 1.0);
  REQUIRE(s.regime == Regime::Interior);
  CHECK(s.lambda_star.value() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK((s.theta - t0 / 2).norm() <= 1e-10);
  CHECK(adversarial_risk(s.theta, t0, id, 1.0) == doctest::Approx((1.0 + kC0) / 2.0).epsilon(1e-10));
  CHECK(s.delta == 1.0);
  CHECK(s.residual <= SolverConfig{}.tol_g);

  for (double delta : {0.85, 1.0, 1.1, 1.2}) {
    const RobustSolution r = solve(t0, id, delta);
    CHECK(rel_err(r.lambda_star.value(), identity_lambda_star(delta)) <= 1e-8);
  }
}

TEST_CASE("solve boundary regimes") {
  Rng rng(24);
  const Problem pr = random_problem(rng);
  const Thresholds t = thresholds(pr.theta0, pr.sigma);

  const RobustSolution low = solve(pr.theta0, pr.sigma, 0.5 * t.delta1);
  CHECK(low.regime == Regime::AtTheta0);
  CHECK(low.theta == pr.theta0);
  CHECK(low.lambda_star.value() == 0.0);
  CHECK(low.residual == 0.0);

  CHECK(solve(pr.theta0, pr.sigma, t.delta1).regime == Regime::AtTheta0);
  const RobustSolution at2 = solve(pr.theta0, pr.sigma, t.delta2);
  CHECK(at2.regime == Regime::AtZero);
  CHECK(at2.lambda_star.is_infinite());
  CHECK(at2.theta.isZero(0.0));
  CHECK(solve(pr.theta0, pr.sigma, 3.0 * t.delta2).regime == Regime::AtZero);
  CHECK(solve(pr.theta0, pr.sigma, 0.0).regime == Regime::AtTheta0);
}

TEST_CASE("solve errors") {
  CHECK_THROWS_AS((void)solve(Vector::Zero(3), Matrix::Identity(3, 3), 1.0), DegenerateModelError);
  const Matrix indefinite = (Matrix(2, 2) << 1, 2, 2, 1).finished();
  CHECK_THROWS_AS(ShrinkagePath(Vector::Ones(2), indefinite), FactorizationError);
  CHECK_THROWS_AS((void)solve(Vector::Ones(2), Matrix::Identity(2, 2), -1.0), ContractViolation);

  SolverConfig bad;
  bad.tol_g = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SolverConfig{};
  bad.max_bisect = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = SolverConfig{};
  bad.bracket_growth = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_NOTHROW(SolverConfig{}.validate());
}

TEST_CASE("interior solutions are stationary points") {
  Rng rng(25);
  std::uniform_real_distribution<double> unif(0.02, 0.98);
  for (int trial = 0; trial < 50; ++trial) {
    const Problem pr = random_problem(rng);
    const Thresholds t = thresholds(pr.theta0, pr.sigma);
    const double delta = t.delta1 + unif(rng) * (t.delta2 - t.delta1);
    const RobustSolution s = solve(pr.theta0, pr.sigma, delta);
    REQUIRE(s.regime == Regime::Interior);
    CHECK(s.lambda_star.value() > 0.0);
    CHECK(risk_gradient(s.theta, pr.theta0, pr.sigma, delta).norm() <= 1e-6 * (1.0 + pr.theta0.norm()));
    CHECK((s.theta - theta_of_lambda(pr.theta0, pr.sigma, s.lambda_star.value())).norm() <= 1e-10);
  }
}

TEST_CASE("delta_of_lambda examples and round trips") {
  const Vector t0 = Vector::Unit(2, 1);
  const Matrix id = Matrix::Identity(2, 2);
  CHECK(delta_of_lambda(t0, id, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(delta_of_lambda(t0, id, 1e-9) == doctest::Approx(kC0).epsilon(1e-6));
  CHECK_THROWS_AS((void)delta_of_lambda(t0, id, 0.0), ContractViolation);

  Rng rng(26);
  for (int trial = 0; trial < 50; ++trial) {
    const Problem pr = random_problem(rng);
    const Thresholds t = thresholds(pr.theta0, pr.sigma);
    const double delta = 0.5 * (t.delta1 + t.delta2);
    const RobustSolution s = solve(pr.theta0, pr.sigma, delta);
    CHECK(rel_err(delta_of_lambda(pr.theta0, pr.sigma, s.lambda_star.value()), delta) <= 1e-8);

    for (double lambda : {0.01, 0.3, 1.0, 4.0, 50.0}) {
      const double d = delta_of_lambda(pr.theta0, pr.sigma, lambda);
      const RobustSolution back = solve(pr.theta0, pr.sigma, d);
      REQUIRE(back.regime == Regime::Interior);
      CHECK(rel_err(back.lambda_star.value(), lambda) <= 1e-8);
    }
  }
}

TEST_CASE("delta_of_lambda is increasing and the transfer map is monotone") {
  Rng rng(27);
  for (int trial = 0; trial < 10; ++trial) {
    const Problem pr = random_problem(rng);
    const ShrinkagePath path(pr.theta0, pr.sigma);
    double prev_delta = -1.0;
    double prev_map = -1.0;
    for (int k = 0; k <= 60; ++k) {
      const double lambda = std::pow(10.0, -3.0 + 0.1 * k);
      const double d = path.delta_of_lambda(lambda);
      const Vector th = path.theta(lambda);
      const double map = quad_norm(th - pr.theta0, pr.sigma) + kC0 * d * th.norm();
      CHECK(d > prev_delta);
      CHECK(map >= prev_map - 1e-12);
      prev_delta = d;
      prev_map = map;
    }
  }
}

TEST_CASE("regime partition and continuity at the thresholds") {
  Rng rng(28);
  for (int trial = 0; trial < 10; ++trial) {
    const Problem pr = random_problem(rng);
    const ShrinkagePath path(pr.theta0, pr.sigma);
    const Thresholds t = path.thresholds();
    for (int k = 0; k <= 200; ++k) {
      const double delta = 2.0 * t.delta2 * k / 200.0;
      const Regime r = path.solve(delta).regime;
      if (delta <= t.delta1) CHECK(r == Regime::AtTheta0);
      else if (delta < t.delta2) CHECK(r == Regime::Interior);
      else CHECK(r == Regime::AtZero);
    }
    const double eps = 1e-4;
    CHECK((path.solve(t.delta1 + eps).theta - pr.theta0).norm() <= 1e-2 * pr.theta0.norm());
    CHECK(path.solve(t.delta2 - eps).theta.norm() <= 1e-2 * pr.theta0.norm());
  }
}

TEST_CASE("solutions are global minima") {
  Rng rng(29);
  for (int trial = 0; trial < 5; ++trial) {
    const Problem pr = random_problem(rng);
    const ShrinkagePath path(pr.theta0, pr.sigma);
    const Thresholds t = path.thresholds();
    for (double delta : {0.5 * t.delta1, 0.5 * (t.delta1 + t.delta2), 1.5 * t.delta2}) {
      const RobustSolution s = path.solve(delta);
      const double best = adversarial_risk(s.theta, pr.theta0, pr.sigma, delta);
      for (int k = 0; k < 100; ++k) {
        const Vector th = s.theta + standard_normal_vector(rng, 5) * std::pow(10.0, -3.0 + (k % 4));
        CHECK(best <= adversarial_risk(th, pr.theta0, pr.sigma, delta) + 1e-12);
      }
    }
  }
}

TEST_CASE("risk along the ridge path is unimodal in eta") {
  Rng rng(30);
  const Problem pr = random_problem(rng);
  const ShrinkagePath path(pr.theta0, pr.sigma);
  const Thresholds t = path.thresholds();
  const double delta = 0.5 * (t.delta1 + t.delta2);
  const double eta_star = 1.0 / path.solve(delta).lambda_star.value();
  double prev = adversarial_risk(Vector::Zero(5), pr.theta0, pr.sigma, delta);
  for (int k = 1; k <= 400; ++k) {
    const double eta = 4.0 * eta_star * k / 400.0;
    const double r = adversarial_risk(path.theta(1.0 / eta), pr.theta0, pr.sigma, delta);
    if (eta < eta_star) CHECK(r <= prev + 1e-14);
    else if (eta - 4.0 * eta_star / 400.0 > eta_star) CHECK(r >= prev - 1e-14);
    prev = r;
  }
}

TEST_CASE("ShrinkagePath agrees with the free functions") {
  Rng rng(31);
  const Problem pr = random_problem(rng);
  const ShrinkagePath path(pr.theta0, pr.sigma);
  const Thresholds t = thresholds(pr.theta0, pr.sigma);
  CHECK(path.thresholds().delta1 == doctest::Approx(t.delta1).epsilon(1e-12));
  CHECK(path.thresholds().delta2 == doctest::Approx(t.delta2).epsilon(1e-12));
  for (double lambda : {0.1, 1.0, 10.0}) {
    CHECK(rel_err(path.theta(lambda), theta_of_lambda(pr.theta0, pr.sigma, lambda)) <= 1e-12);
    CHECK(path.delta_of_lambda(lambda) ==
          doctest::Approx(delta_of_lambda(pr.theta0, pr.sigma, lambda)).epsilon(1e-12));
  }
  for (double eta : {0.0, 0.5, 3.0})
    CHECK(path.g(1.1 * t.delta1, eta) == doctest::Approx(g_of_eta(pr.theta0, pr.sigma, 1.1 * t.delta1, eta)));
}

TEST_CASE("bisection stops within the tolerance for interior solutions") {
  Rng rng(32);
  SolverConfig cfg;
  cfg.tol_g = 1e-9;
  for (int trial = 0; trial < 20; ++trial) {
    const Problem pr = random_problem(rng);
    const Thresholds t = thresholds(pr.theta0, pr.sigma);
    const RobustSolution s = solve(pr.theta0, pr.sigma, 0.3 * t.delta1 + 0.7 * t.delta2, cfg);
    CHECK(s.residual <= cfg.tol_g);
    CHECK(s.iterations >= 1);
  }
}
