#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "gpsens/laplace.hpp"
#include "gpsens/mmle.hpp"

using namespace gpsens;
using namespace testing;

TEST_CASE("quadratic surrogate gives the inverse precision") {
  Matrix a(3, 3);
  a << 4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0;
  Vector mode = vec({0.3, -1.2, 2.0});
  auto f = [&](const Vector& t) { return -0.5 * (t - mode).dot(a * (t - mode)); };
  HyperPosterior hp = laplace_from_objective(f, mode);
  CHECK((hp.covariance - a.inverse()).cwiseAbs().maxCoeff() < 1e-4);
  CHECK(hp.warnings.empty());
  CHECK((hp.covariance - hp.covariance.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("single hyperparameter covariance") {
  std::mt19937_64 rng(3);
  Dataset d = random_dataset(rng, 12);
  FitOptions o;
  o.fix_noise = true;
  FitResult fit = fit_mmle(d, parse_kernel("se(1!, 1)"), o);
  HyperPosterior hp = laplace_hyper_posterior(fit.gp);
  REQUIRE(hp.covariance.rows() == 1);
  CHECK(hp.covariance(0, 0) > 0.0);
}

TEST_CASE("indefinite hessian is floored") {
  Matrix precision(2, 2);
  precision << 1.0, 0.0, 0.0, -2.0;
  std::vector<std::string> warnings;
  Matrix cov = floored_inverse(precision, 1e-8, &warnings);
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  CHECK(es.eigenvalues().minCoeff() > 0.0);
  CHECK_FALSE(warnings.empty());
  // the floored precision eigenvalues are all at least floor * max
  Eigen::SelfAdjointEigenSolver<Matrix> pe(cov.inverse());
  CHECK(pe.eigenvalues().minCoeff() >= 1e-8 * 1.0 * (1 - 1e-6));
}

TEST_CASE("degenerate covariance returns the mode") {
  HyperPosterior hp;
  hp.mode = vec({0.5, -0.3});
  hp.covariance = Matrix::Identity(2, 2) * 1e-16;
  for (const Vector& s : sample_hyperparameters(hp, 50, 1)) {
    CHECK(relative_error(s(0), std::exp(0.5)) < 1e-6);
    CHECK(relative_error(s(1), std::exp(-0.3)) < 1e-6);
  }
}

TEST_CASE("monte carlo mean of log draws") {
  HyperPosterior hp;
  hp.mode = Vector::Zero(3);
  hp.covariance = Matrix::Identity(3, 3);
  auto draws = sample_hyperparameters(hp, 10000, 5);
  Vector mean = Vector::Zero(3);
  for (const Vector& s : draws) mean += s.array().log().matrix();
  mean /= 10000.0;
  CHECK(mean.cwiseAbs().maxCoeff() < 0.05);
  auto again = sample_hyperparameters(hp, 10000, 5);
  for (std::size_t i = 0; i < draws.size(); ++i) CHECK(draws[i] == again[i]);
  auto other = sample_hyperparameters(hp, 3, 6);
  CHECK(other[0] != draws[0]);
}
