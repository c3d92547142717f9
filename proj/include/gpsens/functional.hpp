#pragma once

#include <string>

#include "gpsens/gp.hpp"

namespace gpsens {

enum class FunctionalKind { PosteriorMean, PosteriorQuantile, RelativeChange };

std::string functional_kind_name(FunctionalKind kind);
FunctionalKind parse_functional_kind(const std::string& name);

// Scalar summary F*(k) of the posterior at a test point.
struct FunctionalSpec {
  FunctionalKind kind = FunctionalKind::PosteriorMean;
  Vector x_star;
  double q = 0.95;             // PosteriorQuantile
  bool include_noise = false;  // PosteriorQuantile: quantile of y* instead of f*
  // RelativeChange: (baseline_mean - mean(k)) / baseline_std, frozen at k0.
  double baseline_mean = 0.0;
  double baseline_std = 1.0;

  static FunctionalSpec posterior_mean(Vector x_star);
  static FunctionalSpec posterior_quantile(Vector x_star, double q, bool include_noise);
  // Freezes the baseline from the reference GP.
  static FunctionalSpec relative_change(const FittedGp& reference, Vector x_star);

  void validate() const;
};

// F* as a function of the latent posterior at x*, with its partial derivatives.
struct FunctionalValue {
  double value;
  double d_mean;
  double d_variance;
};
FunctionalValue functional_from_posterior(const FunctionalSpec& spec, const PointPosterior& post,
                                          double noise_variance);

double evaluate_functional(const FittedGp& gp, const FunctionalSpec& spec);

// Gradient of F* with respect to the Gram quantities (training Gram, cross-covariance,
// prior variance at x*) of the GP's kernel.
PosteriorAdjoint functional_adjoint(const FittedGp& gp, const FunctionalSpec& spec, double* value = nullptr);

}  // namespace gpsens
