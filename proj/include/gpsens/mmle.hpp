#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gpsens/gp.hpp"

namespace gpsens {

enum class MmleOptimizer { Bfgs, NelderMead };

struct FitOptions {
  int restarts = 1;
  std::uint64_t seed = 0;
  double initial_noise_variance = 0.1;
  bool fix_noise = false;
  MeanFunction mean = MeanFunction::zero();
  MmleOptimizer optimizer = MmleOptimizer::Bfgs;
  // Standard deviation of the log-space perturbation applied to restarts 1, 2, ...
  double restart_spread = 0.5;
  int max_iterations = 500;
};

struct RestartDiagnostics {
  int index = 0;
  bool ok = false;
  double log_marginal_likelihood = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  std::string message;
  std::vector<double> trace;  // LML after each accepted iterate (non-decreasing)
};

struct FitResult {
  FittedGp gp;
  std::vector<RestartDiagnostics> restarts;
  int best_restart = 0;
};

// Maximizes the log marginal likelihood over the free kernel hyperparameters and the noise
// variance in log space. Restart 0 starts at the template values; later restarts perturb them
// by N(0, restart_spread^2). The best restart wins, ties going to the lower index.
FitResult fit_mmle(const Dataset& data, const Kernel& kernel_template, const FitOptions& options = {});

// Packs a GP's free hyperparameters as [free kernel log-params..., log noise] (noise omitted
// when it is fixed).
Vector packed_log_params(const FittedGp& gp);
// Inverse of packed_log_params on a GP template.
FittedGp unpack_log_params(const FittedGp& gp, const Vector& packed);

}  // namespace gpsens
