#include "gpsens/mmle.hpp"

#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "gpsens/error.hpp"
#include "gpsens/optimize.hpp"

namespace gpsens {

Vector packed_log_params(const FittedGp& gp) {
  const Vector k = gp.kernel().free_log_params();
  Vector out(k.size() + (gp.noise_fixed ? 0 : 1));
  out.head(k.size()) = k;
  if (!gp.noise_fixed) out[k.size()] = std::log(gp.noise_variance());
  return out;
}

FittedGp unpack_log_params(const FittedGp& gp, const Vector& packed) {
  const auto nk = static_cast<Eigen::Index>(gp.kernel().num_free_params());
  Kernel k = gp.kernel().with_free_log_params(packed.head(nk));
  const double noise = gp.noise_fixed ? gp.noise_variance() : std::exp(packed[nk]);
  FittedGp out(gp.data(), std::move(k), noise, gp.mean_function());
  out.noise_fixed = gp.noise_fixed;
  return out;
}

FitResult fit_mmle(const Dataset& data, const Kernel& kernel_template, const FitOptions& options) {
  validate_dataset(data);
  kernel_template.validate();
  if (options.restarts < 1) throw ValidationError("MMLE needs at least one restart");
  if (!(options.initial_noise_variance > 0.0)) throw ValidationError("initial noise variance must be positive");

  const MeanFunction mean = options.mean.resolved(data);
  const auto nk = static_cast<Eigen::Index>(kernel_template.num_free_params());
  const bool fix_noise = options.fix_noise;
  const Eigen::Index n = nk + (fix_noise ? 0 : 1);

  auto split = [&](const Vector& theta) {
    Kernel k = kernel_template.with_free_log_params(theta.head(nk));
    const double noise = fix_noise ? options.initial_noise_variance : std::exp(theta[nk]);
    return std::pair{std::move(k), noise};
  };
  auto objective = [&](const Vector& theta, Vector* grad) {
    auto [k, noise] = split(theta);
    if (!(noise > 0.0) || !std::isfinite(noise)) throw NumericalError("noise variance left the positive reals");
    if (grad == nullptr) return -log_marginal_likelihood(data, k, noise, mean);
    const LmlWithGradient lml = log_marginal_likelihood_with_gradient(data, k, noise, mean);
    *grad = -lml.gradient.head(n);
    return -lml.value;
  };

  Vector start(n);
  start.head(nk) = kernel_template.free_log_params();
  if (!fix_noise) start[nk] = std::log(options.initial_noise_variance);

  MinimizeOptions mopts;
  mopts.max_iterations = options.max_iterations;

  std::vector<RestartDiagnostics> diags;
  std::optional<Vector> best_theta;
  double best_value = -std::numeric_limits<double>::infinity();
  int best_index = -1;
  for (int r = 0; r < options.restarts; ++r) {
    RestartDiagnostics d;
    d.index = r;
    Vector theta0 = start;
    if (r > 0) {
      std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(r)};
      std::mt19937_64 rng(seq);
      std::normal_distribution<double> normal(0.0, options.restart_spread);
      for (Eigen::Index i = 0; i < n; ++i) theta0[i] += normal(rng);
    }
    try {
      MinimizeResult res;
      bool use_nm = options.optimizer == MmleOptimizer::NelderMead;
      if (!use_nm) {
        try {
          res = minimize_bfgs(objective, theta0, mopts);
        } catch (const Error& e) {
          d.message = std::string("BFGS failed (") + e.what() + "); ";
          use_nm = true;
        }
      }
      if (use_nm) {
        res = minimize_nelder_mead([&](const Vector& t) { return objective(t, nullptr); }, theta0, 0.5, mopts);
      }
      Vector g(n);
      objective(res.x, &g);
      d.ok = true;
      d.log_marginal_likelihood = -res.value;
      d.gradient_norm = g.norm();
      d.iterations = res.iterations;
      d.message += res.message;
      for (double v : res.trace) d.trace.push_back(-v);
      if (d.log_marginal_likelihood > best_value) {
        best_value = d.log_marginal_likelihood;
        best_theta = res.x;
        best_index = r;
      }
    } catch (const Error& e) {
      d.ok = false;
      d.message += e.what();
    }
    diags.push_back(std::move(d));
  }

  if (!best_theta) {
    std::ostringstream os;
    os << "all " << options.restarts << " MMLE restarts failed:";
    for (const auto& d : diags) os << "\n  restart " << d.index << ": " << d.message;
    throw FitError(os.str());
  }
  auto [k, noise] = split(*best_theta);
  FittedGp gp(data, std::move(k), noise, mean);
  gp.noise_fixed = fix_noise;
  gp.log_marginal_likelihood = best_value;
  gp.gradient_norm = diags[static_cast<std::size_t>(best_index)].gradient_norm;
  return FitResult{std::move(gp), std::move(diags), best_index};
}

}  // namespace gpsens
