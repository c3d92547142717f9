#pragma once

#include <cmath>
#include <functional>
#include <random>

#include "gpsens/gp.hpp"
#include "gpsens/kernel.hpp"

namespace testing {

using gpsens::Dataset;
using gpsens::Kernel;
using gpsens::Matrix;
using gpsens::Points;
using gpsens::Vector;

inline Points column(std::initializer_list<double> xs) {
  Points p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Vector scalar(double x) { return Vector::Constant(1, x); }

inline Points uniform_points(std::mt19937_64& rng, int n, int d, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Points p(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) p(i, j) = u(rng);
  return p;
}

inline Vector normal_vector(std::mt19937_64& rng, int n, double sd = 1.0) {
  std::normal_distribution<double> z(0.0, sd);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = z(rng);
  return v;
}

inline Dataset random_dataset(std::mt19937_64& rng, int n, int d = 1, double lo = 0.0, double hi = 5.0) {
  Dataset data;
  data.x = uniform_points(rng, n, d, lo, hi);
  data.y = normal_vector(rng, n);
  return data;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// One of the base kernels or a small composite, hyperparameters drawn at random.
inline Kernel random_kernel(std::mt19937_64& rng) {
  double h = log_uniform(rng, 0.5, 2.0);
  double l = log_uniform(rng, 0.5, 2.0);
  switch (std::uniform_int_distribution<int>(0, 4)(rng)) {
    case 0: return Kernel::squared_exponential(h, l);
    case 1: return Kernel::matern52(h, l);
    case 2: return Kernel::rational_quadratic(h, l, log_uniform(rng, 0.5, 3.0));
    case 3: return Kernel::sum({Kernel::squared_exponential(h, l), Kernel::matern52(0.5, 2.0 * l)});
    default:
      return Kernel::product({Kernel::squared_exponential(h, 3.0 * l), Kernel::periodic(1.0, l, 1.5)});
  }
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double central_difference(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Largest |a_i - b_i| over max(|b|_inf, floor).
inline double max_relative_error(const Vector& a, const Vector& b, double floor = 1e-12) {
  double scale = std::max(b.cwiseAbs().maxCoeff(), floor);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

inline double min_eigenvalue(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().minCoeff();
}

inline double spectral_norm(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace testing
