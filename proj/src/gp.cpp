#include "gpsens/gp.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gpsens/error.hpp"

namespace gpsens {

void validate_dataset(const Dataset& data) {
  if (data.x.rows() < 1) throw InputError("dataset is empty");
  if (data.x.cols() < 1) throw InputError("dataset inputs have zero dimensions");
  if (data.x.rows() != data.y.size()) {
    throw InputError("dataset has " + std::to_string(data.x.rows()) + " inputs but " +
                     std::to_string(data.y.size()) + " outputs");
  }
  if (!data.x.allFinite() || !data.y.allFinite()) throw InputError("dataset contains non-finite values");
}

Vector CholeskyFactor::solve(const Vector& rhs) const {
  Vector tmp = lower.triangularView<Eigen::Lower>().solve(rhs);
  return lower.transpose().triangularView<Eigen::Upper>().solve(tmp);
}

double CholeskyFactor::log_det() const { return 2.0 * lower.diagonal().array().log().sum(); }

CholeskyFactor robust_cholesky(const Matrix& a, const std::string& what) {
  if (a.rows() != a.cols()) throw InputError(what + ": Cholesky of a non-square matrix");
  if (!a.allFinite()) throw NumericalError(what + ": matrix has non-finite entries");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() == Eigen::Success) return {llt.matrixL(), 0.0};
  const double scale = a.diagonal().mean();
  for (double rel = 1e-8; rel <= 1e-2 * (1 + 1e-9); rel *= 10.0) {
    const double jitter = rel * scale;
    Matrix b = a;
    b.diagonal().array() += jitter;
    llt.compute(b);
    if (llt.info() == Eigen::Success) return {llt.matrixL(), jitter};
  }
  throw NumericalError(what + ": Cholesky failed even with jitter 1e-2 * mean(diag)");
}

MeanFunction MeanFunction::resolved(const Dataset& data) const {
  switch (kind) {
    case Kind::Zero: return {Kind::Zero, 0.0};
    case Kind::Constant: return *this;
    case Kind::TrainingMean: return {Kind::TrainingMean, data.y.mean()};
  }
  return *this;
}

double PointPosterior::std() const { return std::sqrt(variance); }

FittedGp::FittedGp(Dataset data, Kernel kernel, double noise_variance, MeanFunction mean)
    : data_(std::move(data)), kernel_(std::move(kernel)), noise_variance_(noise_variance) {
  validate_dataset(data_);
  if (!(noise_variance_ > 0.0) || !std::isfinite(noise_variance_)) {
    throw ValidationError("noise variance must be positive");
  }
  mean_ = mean.resolved(data_);
  gram_ = gram(kernel_, data_.x);
  Matrix a = gram_;
  a.diagonal().array() += noise_variance_;
  factor_ = robust_cholesky(a, "K + noise I");
  alpha_ = factor_.solve((data_.y.array() - mean_.value).matrix());
}

FittedGp FittedGp::with_kernel(Kernel kernel) const {
  FittedGp out(data_, std::move(kernel), noise_variance_, mean_);
  out.noise_fixed = noise_fixed;
  return out;
}

PointPosterior FittedGp::posterior(const Vector& x_star) const {
  if (x_star.size() != data_.dim()) throw InputError("test point dimension mismatch");
  if (!x_star.allFinite()) throw InputError("test point must be finite");
  const Points xs = x_star.transpose();
  const Vector cross = gram(kernel_, data_.x, xs).col(0);
  const double prior = gram(kernel_, xs)(0, 0);
  const Vector v = factor_.lower.triangularView<Eigen::Lower>().solve(cross);
  return {mean_.value + cross.dot(alpha_), std::max(0.0, prior - v.squaredNorm())};
}

PointPosterior posterior(const FittedGp& gp, const Vector& x_star) { return gp.posterior(x_star); }

double standard_normal_quantile(double q) {
  if (!(q > 0.0 && q < 1.0)) throw ValidationError("quantile level must lie in (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), q);
}

double posterior_quantile(const FittedGp& gp, const Vector& x_star, double q, bool include_noise) {
  const double z = standard_normal_quantile(q);
  const PointPosterior p = gp.posterior(x_star);
  const double var = p.variance + (include_noise ? gp.noise_variance() : 0.0);
  return p.mean + z * std::sqrt(var);
}

double log_marginal_likelihood(const Dataset& data, const Kernel& k, double noise_variance, MeanFunction mean) {
  const FittedGp gp(data, k, noise_variance, mean);
  const Vector r = data.y.array() - gp.mean_function().value;
  const double n = static_cast<double>(data.size());
  return -0.5 * r.dot(gp.alpha()) - 0.5 * gp.factor().log_det() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

LmlWithGradient log_marginal_likelihood_with_gradient(const Dataset& data, const Kernel& k,
                                                      double noise_variance, MeanFunction mean) {
  validate_dataset(data);
  if (!(noise_variance > 0.0)) throw ValidationError("noise variance must be positive");
  mean = mean.resolved(data);
  GramWithGradients g = gram_with_param_gradients(k, data.x);
  Matrix a = g.value;
  a.diagonal().array() += noise_variance;
  const CholeskyFactor f = robust_cholesky(a, "K + noise I");
  const Vector r = data.y.array() - mean.value;
  const Vector alpha = f.solve(r);
  const double n = static_cast<double>(data.size());

  LmlWithGradient out;
  out.value = -0.5 * r.dot(alpha) - 0.5 * f.log_det() - 0.5 * n * std::log(2.0 * std::numbers::pi);

  // 0.5 tr((alpha alpha^T - A^-1) dA)
  Matrix inv = f.lower.triangularView<Eigen::Lower>().solve(Matrix::Identity(a.rows(), a.cols()));
  inv = inv.transpose() * inv;
  const Matrix w = alpha * alpha.transpose() - inv;
  out.gradient.resize(static_cast<Eigen::Index>(g.d_log_params.size()) + 1);
  for (std::size_t p = 0; p < g.d_log_params.size(); ++p) {
    out.gradient[static_cast<Eigen::Index>(p)] = 0.5 * w.cwiseProduct(g.d_log_params[p]).sum();
  }
  out.gradient[out.gradient.size() - 1] = 0.5 * noise_variance * w.trace();
  return out;
}

PosteriorAdjoint posterior_adjoint(const FittedGp& gp, const Vector& cross, double d_mean, double d_variance) {
  const Vector beta = gp.factor().solve(cross);
  const Vector& alpha = gp.alpha();
  PosteriorAdjoint out;
  // mean = m + k*^T A^-1 r ; var = k** - k*^T A^-1 k*
  Matrix dg = -d_mean * beta * alpha.transpose() + d_variance * beta * beta.transpose();
  out.d_gram = 0.5 * (dg + dg.transpose());
  out.d_cross = d_mean * alpha - 2.0 * d_variance * beta;
  out.d_prior_variance = d_variance;
  return out;
}

}  // namespace gpsens
