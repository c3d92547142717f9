#pragma once

#include <string>

#include "gpsens/kernel.hpp"
#include "gpsens/types.hpp"

namespace gpsens {

// Lower Cholesky factor of a symmetric matrix, with the diagonal jitter that was needed.
struct CholeskyFactor {
  Matrix lower;
  double jitter = 0.0;

  Vector solve(const Vector& rhs) const;
  double log_det() const;
};

// Jitter ladder: none, then 1e-8 * mean(diag) growing tenfold up to 1e-2 * mean(diag).
// Throws NumericalError (mentioning `what`) when every rung fails.
CholeskyFactor robust_cholesky(const Matrix& a, const std::string& what = "covariance");

struct MeanFunction {
  enum class Kind { Zero, Constant, TrainingMean };
  Kind kind = Kind::Zero;
  double value = 0.0;  // resolved constant; TrainingMean is resolved against the dataset

  static MeanFunction zero() { return {}; }
  static MeanFunction constant(double c) { return {Kind::Constant, c}; }
  static MeanFunction training_mean() { return {Kind::TrainingMean, 0.0}; }

  MeanFunction resolved(const Dataset& data) const;
};

struct PointPosterior {
  double mean;
  double variance;
  double std() const;
};

// A GP conditioned on data with frozen kernel and noise; the factor of K + noise*I is cached.
class FittedGp {
 public:
  FittedGp(Dataset data, Kernel kernel, double noise_variance, MeanFunction mean = MeanFunction::zero());

  const Dataset& data() const { return data_; }
  const Kernel& kernel() const { return kernel_; }
  double noise_variance() const { return noise_variance_; }
  const MeanFunction& mean_function() const { return mean_; }
  const CholeskyFactor& factor() const { return factor_; }
  // (K + noise I)^-1 (y - m)
  const Vector& alpha() const { return alpha_; }
  const Matrix& train_gram() const { return gram_; }

  // Same data, noise and mean, different kernel.
  FittedGp with_kernel(Kernel kernel) const;

  PointPosterior posterior(const Vector& x_star) const;

  // Fit bookkeeping, populated by fit_mmle.
  double log_marginal_likelihood = 0.0;
  double gradient_norm = 0.0;
  bool noise_fixed = false;

 private:
  Dataset data_;
  Kernel kernel_;
  double noise_variance_;
  MeanFunction mean_;
  Matrix gram_;
  CholeskyFactor factor_;
  Vector alpha_;
};

PointPosterior posterior(const FittedGp& gp, const Vector& x_star);

// mean + Phi^-1(q) s with s the latent std (or sqrt(var + noise) with include_noise).
double posterior_quantile(const FittedGp& gp, const Vector& x_star, double q, bool include_noise);

double standard_normal_quantile(double q);

double log_marginal_likelihood(const Dataset& data, const Kernel& k, double noise_variance,
                               MeanFunction mean = MeanFunction::zero());

struct LmlWithGradient {
  double value;
  // d/d log(theta) for each free kernel hyperparameter, then d/d log(noise variance).
  Vector gradient;
};
LmlWithGradient log_marginal_likelihood_with_gradient(const Dataset& data, const Kernel& k,
                                                      double noise_variance,
                                                      MeanFunction mean = MeanFunction::zero());

// Derivatives of a scalar L(mean, variance) of the posterior at x* with respect to the
// kernel quantities it is built from: the training Gram (symmetrized), the cross-covariance
// k(x*, X) and the prior variance k(x*, x*).
struct PosteriorAdjoint {
  Matrix d_gram;
  Vector d_cross;
  double d_prior_variance;
};
PosteriorAdjoint posterior_adjoint(const FittedGp& gp, const Vector& cross, double d_mean,
                                   double d_variance);

}  // namespace gpsens
