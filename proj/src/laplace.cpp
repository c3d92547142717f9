#include "gpsens/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "gpsens/error.hpp"
#include "gpsens/mmle.hpp"

namespace gpsens {

Matrix floored_inverse(const Matrix& precision, double relative_floor, std::vector<std::string>* warnings) {
  const Matrix sym = 0.5 * (precision + precision.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericalError("eigendecomposition of the Hessian failed");
  Vector values = eig.eigenvalues();
  const double top = values.cwiseAbs().maxCoeff();
  const double floor = relative_floor * (top > 0.0 ? top : 1.0);
  bool floored = false;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values[i] < floor) {
      values[i] = floor;
      floored = true;
    }
  }
  if (floored && warnings != nullptr) {
    warnings->push_back("negative Hessian was not positive definite; eigenvalues floored at " +
                        std::to_string(floor));
  }
  const Matrix& v = eig.eigenvectors();
  Matrix cov = v * values.cwiseInverse().asDiagonal() * v.transpose();
  return 0.5 * (cov + cov.transpose());
}

HyperPosterior laplace_from_objective(const std::function<double(const Vector&)>& log_density, const Vector& mode,
                                      const LaplaceOptions& options) {
  const Eigen::Index n = mode.size();
  if (n == 0) throw ValidationError("Laplace approximation needs at least one hyperparameter");
  Vector step(n);
  for (Eigen::Index i = 0; i < n; ++i) step[i] = options.relative_step * std::max(1.0, std::abs(mode[i]));

  const double f0 = log_density(mode);
  Matrix hess(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector xp = mode;
    Vector xm = mode;
    xp[i] += step[i];
    xm[i] -= step[i];
    hess(i, i) = (log_density(xp) - 2.0 * f0 + log_density(xm)) / (step[i] * step[i]);
    for (Eigen::Index j = i + 1; j < n; ++j) {
      Vector pp = mode, pm = mode, mp = mode, mm = mode;
      pp[i] += step[i];
      pp[j] += step[j];
      pm[i] += step[i];
      pm[j] -= step[j];
      mp[i] -= step[i];
      mp[j] += step[j];
      mm[i] -= step[i];
      mm[j] -= step[j];
      hess(i, j) = hess(j, i) =
          (log_density(pp) - log_density(pm) - log_density(mp) + log_density(mm)) / (4.0 * step[i] * step[j]);
    }
  }
  HyperPosterior hp;
  hp.mode = mode;
  hp.covariance = floored_inverse(-hess, options.eigen_floor, &hp.warnings);
  return hp;
}

HyperPosterior laplace_hyper_posterior(const FittedGp& gp, const LaplaceOptions& options) {
  auto log_density = [&](const Vector& theta) {
    const FittedGp probe = unpack_log_params(gp, theta);
    return log_marginal_likelihood(probe.data(), probe.kernel(), probe.noise_variance(), probe.mean_function());
  };
  HyperPosterior hp = laplace_from_objective(log_density, packed_log_params(gp), options);
  if (gp.gradient_norm > 1e-3) {
    hp.warnings.push_back("gradient norm at the mode is " + std::to_string(gp.gradient_norm) +
                          "; the Laplace approximation assumes a stationary point");
  }
  return hp;
}

std::vector<Vector> sample_hyperparameters(const HyperPosterior& hp, int count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("need at least one hyperparameter draw");
  const Eigen::Index n = hp.mode.size();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (hp.covariance + hp.covariance.transpose()));
  const Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  Vector z(n);
  for (int r = 0; r < count; ++r) {
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    out.push_back((hp.mode + root * z).array().exp().matrix());
  }
  return out;
}

}  // namespace gpsens
