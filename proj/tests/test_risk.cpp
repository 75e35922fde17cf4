#include "advlin/risk.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace advlin;
using namespace advlin::testing;

namespace {

ModelSpec identity_model(Eigen::Index p, double noise_var = 1.0) {
  return ModelSpec(Vector::Unit(p, 0), Matrix::Identity(p, p), noise_var);
}

struct Point {
  Vector theta;
  Vector theta0;
  Matrix sigma;
  double delta;
};

Point random_point(Rng& rng) {
  const Eigen::Index p = 2 + static_cast<Eigen::Index>(rng() % 6);
  Point pt;
  pt.sigma = random_pd(rng, p);
  pt.theta0 = standard_normal_vector(rng, p);
  pt.theta = standard_normal_vector(rng, p);
  pt.delta = 0.1 + 2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return pt;
}

}  // namespace

TEST_CASE("adversarial_risk examples") {
  const ModelSpec m = identity_model(3);
  CHECK(adversarial_risk(m.theta0(), m, 0.5) == doctest::Approx(0.25).epsilon(1e-15));

  Rng rng(1);
  const Matrix s = random_pd(rng, 4);
  const Vector t0 = standard_normal_vector(rng, 4);
  const double q = t0.dot(s * t0);
  for (double delta : {0.0, 0.3, 5.0}) CHECK(adversarial_risk(Vector::Zero(4), t0, s, delta) == doctest::Approx(q));

  const ModelSpec m2 = identity_model(2);
  const double expected = 0.25 + 0.5 * kC0 + 0.25;
  CHECK(std::abs(adversarial_risk(m2.theta0() / 2, m2, 1.0) - expected) <= 1e-15);
  CHECK(std::abs(expected - (1.0 + kC0) / 2.0) <= 1e-15);
  CHECK_THROWS_AS((void)adversarial_risk(m2.theta0(), m2, -0.1), ContractViolation);
}

TEST_CASE("standard_risk examples") {
  const ModelSpec m = identity_model(2);
  CHECK(standard_risk(m.theta0(), m) == 0.0);
  CHECK(standard_risk(m.theta0() / 2, m) == doctest::Approx(0.25));
  const double closed = (1 - kC0) * (1 - kC0) / ((2 - 2 * kC0) * (2 - 2 * kC0));
  CHECK(closed == doctest::Approx(0.25));
  CHECK(standard_risk(Vector::Zero(2), m) == doctest::Approx(1.0));

  Rng rng(2);
  const Point pt = random_point(rng);
  const ModelSpec rm(pt.theta0, pt.sigma, 1.0);
  CHECK(adversarial_risk(pt.theta, rm, 0.0) == doctest::Approx(standard_risk(pt.theta, rm)).epsilon(1e-14));
}

TEST_CASE("adversarial_prediction_risk examples") {
  Rng rng(3);
  const Point pt = random_point(rng);
  const ModelSpec noiseless(pt.theta0, pt.sigma, 0.0);
  CHECK(adversarial_prediction_risk(pt.theta, noiseless, pt.delta) ==
        doctest::Approx(adversarial_risk(pt.theta, noiseless, pt.delta)).epsilon(1e-14));

  const ModelSpec noisy(pt.theta0, pt.sigma, 0.7);
  CHECK(adversarial_prediction_risk(Vector::Zero(pt.theta0.size()), noisy, pt.delta) ==
        doctest::Approx(pt.theta0.dot(pt.sigma * pt.theta0) + 0.7));

  const ModelSpec m = identity_model(3, 1.0);
  CHECK(adversarial_prediction_risk(m.theta0(), m, 1.0) == doctest::Approx(2.0 + 2.0 * kC0).epsilon(1e-14));
  CHECK(2.0 + 2.0 * kC0 == doctest::Approx(3.595769).epsilon(1e-6));
}

TEST_CASE("prediction risk at theta0 splits into noise and attack terms") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Point pt = random_point(rng);
    const double s2 = 0.5 + trial;
    const ModelSpec m(pt.theta0, pt.sigma, s2);
    const double n0 = pt.theta0.norm();
    const double expected = s2 + 2.0 * pt.delta * kC0 * n0 * std::sqrt(s2) + pt.delta * pt.delta * n0 * n0;
    CHECK(adversarial_prediction_risk(pt.theta0, m, pt.delta) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(adversarial_risk(pt.theta0, m, pt.delta) == doctest::Approx(pt.delta * pt.delta * n0 * n0).epsilon(1e-13));
  }
}

TEST_CASE("prediction risk agrees with a direct simulation of the attacked loss") {
  Rng rng(5);
  const Point pt = random_point(rng);
  const ModelSpec m(pt.theta0, pt.sigma, 0.8);
  const Matrix l = Eigen::LLT<Matrix>(pt.sigma).matrixL();
  const int n = 200000;
  const Matrix x = gaussian_rows(rng, n, l);
  const Vector eps = std::sqrt(0.8) * standard_normal_vector(rng, n);
  const Vector y = x * pt.theta0 + eps;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const Vector xs = worst_case_input(x.row(i).transpose(), pt.theta, pt.delta, y(i));
    const double loss = std::pow(xs.dot(pt.theta) - y(i), 2);
    sum += loss;
    sum_sq += loss * loss;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  CHECK(std::abs(mean - adversarial_prediction_risk(pt.theta, m, pt.delta)) <= 4.0 * se);
}

TEST_CASE("gradient vanishes at the identity-covariance optimum") {
  const ModelSpec m = identity_model(4);
  CHECK(risk_gradient(m.theta0() / 2, m, 1.0).norm() <= 1e-10);
}

TEST_CASE("gradient and half Hessian at delta = 0") {
  Rng rng(6);
  const Point pt = random_point(rng);
  CHECK((risk_gradient(pt.theta, pt.theta0, pt.sigma, 0.0) - 2.0 * pt.sigma * (pt.theta - pt.theta0)).norm() <=
        1e-12);
  CHECK(risk_hessian(pt.theta, pt.theta0, pt.sigma, 0.0) == pt.sigma);
  CHECK_NOTHROW((void)risk_gradient(pt.theta0, pt.theta0, pt.sigma, 0.0));
}

TEST_CASE("gradient and Hessian match central differences") {
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Point pt = random_point(rng);
    const double h = 1e-6 * (1.0 + pt.theta.norm());
    auto f = [&](const Vector& t) { return adversarial_risk(t, pt.theta0, pt.sigma, pt.delta); };
    const Vector g = risk_gradient(pt.theta, pt.theta0, pt.sigma, pt.delta);
    CHECK(rel_err(g, central_gradient(f, pt.theta, h)) <= 1e-5);

    auto grad = [&](const Vector& t) { return risk_gradient(t, pt.theta0, pt.sigma, pt.delta); };
    const Matrix fd = 0.5 * central_jacobian(grad, pt.theta, 1e-5 * (1.0 + pt.theta.norm()));
    const Matrix hess = risk_hessian(pt.theta, pt.theta0, pt.sigma, pt.delta);
    CHECK(rel_err(hess, fd) <= 1e-4);
    CHECK(is_symmetric(hess, 0.0));
    CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(hess).eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("derivatives are rejected at 0 and theta0") {
  Rng rng(8);
  const Point pt = random_point(rng);
  const Vector zero = Vector::Zero(pt.theta0.size());
  CHECK_THROWS_AS((void)risk_gradient(zero, pt.theta0, pt.sigma, 0.5), SingularPointError);
  CHECK_THROWS_AS((void)risk_gradient(pt.theta0, pt.theta0, pt.sigma, 0.5), SingularPointError);
  CHECK_THROWS_AS((void)risk_hessian(zero, pt.theta0, pt.sigma, 0.5), SingularPointError);
  const Vector near = pt.theta0 + Vector::Constant(pt.theta0.size(), 1e-14 * pt.theta0.norm());
  CHECK_THROWS_AS((void)risk_hessian(near, pt.theta0, pt.sigma, 0.5), SingularPointError);
}

TEST_CASE("risk is convex along segments") {
  Rng rng(9);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Point pt = random_point(rng);
    const Vector other = standard_normal_vector(rng, pt.theta.size());
    const double t = unif(rng);
    auto f = [&](const Vector& v) { return adversarial_risk(v, pt.theta0, pt.sigma, pt.delta); };
    CHECK(f(t * pt.theta + (1 - t) * other) <= t * f(pt.theta) + (1 - t) * f(other) + 1e-10);
  }
}

TEST_CASE("worst_case_input examples") {
  const Vector x = Vector::LinSpaced(3, 1, 3);
  CHECK(worst_case_input(x, Vector::Zero(3), 0.7, 1.0) == x);

  const Vector theta = (Vector(3) << 1, -2, 2).finished();
  const Vector tie = worst_case_input(x, theta, 0.6, x.dot(theta));
  CHECK((tie - (x + 0.6 * theta / 3.0)).norm() <= 1e-15);

  const Vector x1 = Vector::Constant(1, 1.0);
  const Vector t1 = Vector::Constant(1, 2.0);
  const Vector best = worst_case_input(x1, t1, 0.5, 0.0);
  CHECK(best(0) == doctest::Approx(1.5));
  const double loss = std::pow(best(0) * 2.0, 2);
  CHECK(loss == doctest::Approx(9.0));
  double brute = 0.0;
  for (int k = 0; k <= 10000; ++k) brute = std::max(brute, std::pow((0.5 + k * 1e-4) * 2.0, 2));
  CHECK(loss >= brute - 1e-12);
  CHECK(loss == doctest::Approx(brute).epsilon(1e-12));
}

TEST_CASE("worst_case_input attains the analytic inner maximum") {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Point pt = random_point(rng);
    const Eigen::Index p = pt.theta.size();
    const Vector x = standard_normal_vector(rng, p);
    const double target = x.dot(pt.theta0);
    const Vector xs = worst_case_input(x, pt.theta, pt.delta, target);
    CHECK((xs - x).norm() == doctest::Approx(pt.delta).epsilon(1e-12));
    const double value = std::pow(xs.dot(pt.theta) - target, 2);
    const double analytic = std::pow(pt.delta * pt.theta.norm() + std::abs(x.dot(pt.theta - pt.theta0)), 2);
    CHECK(std::abs(value - analytic) <= 1e-12 * std::max(1.0, analytic));
    for (int k = 0; k < 100; ++k) {
      const Vector dir = unit_vector(rng, p);
      const double r = pt.delta * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      CHECK(std::pow((x + r * dir).dot(pt.theta) - target, 2) <= value + 1e-12);
    }
  }
}

TEST_CASE("monte_carlo_risk at theta0 has zero variance") {
  const ModelSpec m = identity_model(10);
  const MonteCarloEstimate est = monte_carlo_risk(m.theta0(), m, 0.6, 10000, 3);
  CHECK(est.mean == 0.36 * m.theta0().squaredNorm());
  CHECK(est.std_error == 0.0);
}

TEST_CASE("monte_carlo_risk converges at the n^-1/2 rate") {
  Rng rng(11);
  const Point pt = random_point(rng);
  const ModelSpec m(pt.theta0, pt.sigma, 1.0);
  const double exact = adversarial_risk(pt.theta, m, pt.delta);
  double prev_scaled = 0.0;
  for (std::int64_t n : {1000, 10000, 100000}) {
    const MonteCarloEstimate est = monte_carlo_risk(pt.theta, m, pt.delta, n, 99);
    CHECK(std::abs(est.mean - exact) <= 4.0 * est.std_error);
    const double scaled = est.std_error * std::sqrt(static_cast<double>(n));
    if (prev_scaled > 0.0) CHECK(rel_err(scaled, prev_scaled) <= 0.2);
    prev_scaled = scaled;
  }
}

TEST_CASE("monte_carlo_risk is deterministic in the seed") {
  Rng rng(12);
  const Point pt = random_point(rng);
  const ModelSpec m(pt.theta0, pt.sigma, 1.0);
  const auto a = monte_carlo_risk(pt.theta, m, pt.delta, 9000, 5);
  const auto b = monte_carlo_risk(pt.theta, m, pt.delta, 9000, 5);
  const auto c = monte_carlo_risk(pt.theta, m, pt.delta, 9000, 6);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean != c.mean);
}

TEST_CASE("mean absolute normal over its standard deviation approaches c0") {
  Rng rng(13);
  const int n = 1000000;
  const Vector z = standard_normal_vector(rng, n);
  const double mean_abs = z.cwiseAbs().mean();
  const double sd = std::sqrt(z.squaredNorm() / n - z.mean() * z.mean());
  const double ratio = mean_abs / sd;
  // Delta-method SE of E|Z|/sd(Z) for a standard normal.
  const double se = std::sqrt((1.0 - 1.5 * kC0 * kC0) / n);
  CHECK(std::abs(ratio - kC0) <= 3.0 * se);
}
