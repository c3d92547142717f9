#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpsens/gp.hpp"

namespace gpsens {

// Gaussian approximation to the hyperparameter posterior in log space.
struct HyperPosterior {
  Vector mode;        // packed log-params (see packed_log_params)
  Matrix covariance;  // inverse of the floored negative Hessian
  std::vector<std::string> warnings;
};

struct LaplaceOptions {
  double relative_step = 1e-4;   // per coordinate: step * max(1, |theta_i|)
  double eigen_floor = 1e-8;     // relative to the largest eigenvalue of the negative Hessian
};

// Central finite-difference negative Hessian of `log_density` at `mode`, symmetrized, with
// eigenvalues floored at eigen_floor * max eigenvalue, then inverted.
HyperPosterior laplace_from_objective(const std::function<double(const Vector&)>& log_density,
                                      const Vector& mode, const LaplaceOptions& options = {});

HyperPosterior laplace_hyper_posterior(const FittedGp& gp, const LaplaceOptions& options = {});

// Floors the eigenvalues of a symmetric precision matrix and inverts it. Appends a warning
// when flooring was needed.
Matrix floored_inverse(const Matrix& precision, double relative_floor, std::vector<std::string>* warnings);

// R multivariate-normal draws in log space, exponentiated back to positive values.
std::vector<Vector> sample_hyperparameters(const HyperPosterior& hp, int count, std::uint64_t seed);

}  // namespace gpsens
