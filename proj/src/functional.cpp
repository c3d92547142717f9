#include "gpsens/functional.hpp"

#include <cmath>

#include "gpsens/error.hpp"

namespace gpsens {

std::string functional_kind_name(FunctionalKind kind) {
  switch (kind) {
    case FunctionalKind::PosteriorMean: return "posterior-mean";
    case FunctionalKind::PosteriorQuantile: return "posterior-quantile";
    case FunctionalKind::RelativeChange: return "relative-change";
  }
  return "?";
}

FunctionalKind parse_functional_kind(const std::string& name) {
  if (name == "posterior-mean") return FunctionalKind::PosteriorMean;
  if (name == "posterior-quantile") return FunctionalKind::PosteriorQuantile;
  if (name == "relative-change") return FunctionalKind::RelativeChange;
  throw ConfigError("unknown functional kind '" + name + "'");
}

FunctionalSpec FunctionalSpec::posterior_mean(Vector x_star) {
  FunctionalSpec s;
  s.kind = FunctionalKind::PosteriorMean;
  s.x_star = std::move(x_star);
  return s;
}

FunctionalSpec FunctionalSpec::posterior_quantile(Vector x_star, double q, bool include_noise) {
  FunctionalSpec s;
  s.kind = FunctionalKind::PosteriorQuantile;
  s.x_star = std::move(x_star);
  s.q = q;
  s.include_noise = include_noise;
  s.validate();
  return s;
}

FunctionalSpec FunctionalSpec::relative_change(const FittedGp& reference, Vector x_star) {
  FunctionalSpec s;
  s.kind = FunctionalKind::RelativeChange;
  s.x_star = std::move(x_star);
  const PointPosterior p = reference.posterior(s.x_star);
  s.baseline_mean = p.mean;
  s.baseline_std = p.std();
  s.validate();
  return s;
}

void FunctionalSpec::validate() const {
  if (x_star.size() == 0 || !x_star.allFinite()) throw ValidationError("functional test point must be finite");
  if (kind == FunctionalKind::PosteriorQuantile && !(q > 0.0 && q < 1.0)) {
    throw ValidationError("quantile level must lie in (0, 1)");
  }
  if (kind == FunctionalKind::RelativeChange && !(baseline_std > 0.0)) {
    throw ValidationError("relative-change baseline standard deviation must be positive");
  }
}

FunctionalValue functional_from_posterior(const FunctionalSpec& spec, const PointPosterior& post,
                                          double noise_variance) {
  switch (spec.kind) {
    case FunctionalKind::PosteriorMean:
      return {post.mean, 1.0, 0.0};
    case FunctionalKind::PosteriorQuantile: {
      const double z = standard_normal_quantile(spec.q);
      const double var = post.variance + (spec.include_noise ? noise_variance : 0.0);
      const double s = std::sqrt(var);
      return {post.mean + z * s, 1.0, s > 0.0 ? z / (2.0 * s) : 0.0};
    }
    case FunctionalKind::RelativeChange:
      return {(spec.baseline_mean - post.mean) / spec.baseline_std, -1.0 / spec.baseline_std, 0.0};
  }
  throw Error("unknown functional kind");
}

double evaluate_functional(const FittedGp& gp, const FunctionalSpec& spec) {
  return functional_from_posterior(spec, gp.posterior(spec.x_star), gp.noise_variance()).value;
}

PosteriorAdjoint functional_adjoint(const FittedGp& gp, const FunctionalSpec& spec, double* value) {
  const Points xs = spec.x_star.transpose();
  const Vector cross = gram(gp.kernel(), gp.data().x, xs).col(0);
  const FunctionalValue fv = functional_from_posterior(spec, gp.posterior(spec.x_star), gp.noise_variance());
  if (value != nullptr) *value = fv.value;
  return posterior_adjoint(gp, cross, fv.d_mean, fv.d_variance);
}

}  // namespace gpsens
