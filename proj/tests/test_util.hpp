#pragma once

#include "advlin/core.hpp"
#include "advlin/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace advlin::testing {

// Wishart-like draw plus a ridge, so the condition number stays moderate.
inline Matrix random_pd(Rng& rng, Eigen::Index p, double ridge = 0.2) {
  const Matrix g = standard_normal_matrix(rng, p, p);
  Matrix s = g * g.transpose() / static_cast<double>(p) + ridge * Matrix::Identity(p, p);
  return 0.5 * (s + s.transpose());
}

inline Matrix random_orthogonal(Rng& rng, Eigen::Index p) {
  Eigen::HouseholderQR<Matrix> qr(standard_normal_matrix(rng, p, p));
  return qr.householderQ();
}

inline Vector unit_vector(Rng& rng, Eigen::Index p) {
  const Vector v = standard_normal_vector(rng, p);
  return v / v.norm();
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

inline double rel_err(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

inline Vector central_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h) {
  Vector g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    g(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

inline Matrix central_jacobian(const std::function<Vector(const Vector&)>& f, const Vector& x, double h) {
  Matrix j(x.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Vector xp = x;
    Vector xm = x;
    xp(i) += h;
    xm(i) -= h;
    j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

}  // namespace advlin::testing
