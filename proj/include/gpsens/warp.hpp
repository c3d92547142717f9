#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gpsens/functional.hpp"
#include "gpsens/gp.hpp"
#include "gpsens/kernel.hpp"
#include "gpsens/warp_net.hpp"

namespace gpsens {

// Wraps every flagged node (preorder index) of k0 in a Warped node sharing `net`. Flags on
// Spectral nodes, on nodes containing one, or on both a node and one of its descendants are
// rejected.
Kernel warped_kernel(const Kernel& k0, std::shared_ptr<const WarpNet> net, const std::vector<std::size_t>& flags);

// Preorder indices of every leaf that is not Periodic.
std::vector<std::size_t> flags_except_periodic(const Kernel& k0);
// Just the root: the whole kernel reads warped inputs.
std::vector<std::size_t> flags_whole_kernel();

struct LossValue {
  double value;
  double d_mean;
  double d_std;
};
using LossHook = std::function<LossValue(double mean, double std, double delta)>;

struct WarpLoss {
  enum class Kind { ThresholdSquared, Custom };
  Kind kind = Kind::ThresholdSquared;
  LossHook hook;  // Custom only

  static WarpLoss threshold_squared() { return {}; }
  static WarpLoss custom(LossHook hook) { return {Kind::Custom, std::move(hook)}; }
};

struct WarpObjectiveSpec {
  FunctionalSpec functional;
  double delta = 0.0;
  WarpLoss loss;
  Points regularizer_grid;  // M x D
  double epsilon = 1.0;
  std::vector<std::size_t> flags;

  void validate(int dim) const;
};

// Training inputs stacked with the test point.
Points default_regularizer_grid(const FittedGp& gp0, const Vector& x_star);

struct WarpEvaluation {
  double objective;
  double loss;
  double regularizer;
  double functional;  // F* under the warped kernel
  PointPosterior posterior;
};

// loss(F*) + (1 / (eps M)) sum_m |h(x~_m)|^2 with kernel hyperparameters, noise and mean
// frozen at gp0.
WarpEvaluation evaluate_warp(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpNet& net);
double warp_objective(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpNet& net);

// Gradient of warp_objective over net.parameters().
Vector warp_gradient(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpNet& net,
                     WarpEvaluation* evaluation = nullptr);

struct WarpSearchOptions {
  std::vector<int> hidden{50, 50};
  double init_scale = 0.1;
  int steps = 200;
  // Largest Euclidean step in weight space.
  double step_size = 0.05;
  int max_halvings = 20;
  int restarts = 1;
  std::uint64_t seed = 0;
  // Stop a restart once the objective drops to this value.
  double objective_tolerance = 0.0;
  // Extra starting networks, run after the random restarts.
  std::vector<WarpNet> warm_starts;
};

struct WarpRestart {
  int index = 0;
  std::string origin;  // "random" or "warm"
  double start_objective = 0.0;
  double objective = 0.0;
  double functional = 0.0;
  int steps = 0;
  std::string status;
  std::vector<double> trace;  // objective after each accepted step, starting value first
};

struct WarpSearchResult {
  WarpNet net;
  double objective = 0.0;
  double functional = 0.0;
  int best_restart = 0;
  std::vector<WarpRestart> restarts;
};

// Normalized gradient descent with step halving on rejection and doubling (up to step_size)
// on acceptance. Restart r draws its initial weights from a generator seeded by (seed, r).
WarpSearchResult minimize_warp(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpSearchOptions& options = {});

// A single descent from `net`, which is updated in place.
WarpRestart descend_warp(const FittedGp& gp0, const WarpObjectiveSpec& spec, WarpNet& net,
                         const WarpSearchOptions& options);

}  // namespace gpsens
