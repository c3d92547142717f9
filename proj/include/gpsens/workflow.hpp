#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpsens/diagnostics.hpp"
#include "gpsens/functional.hpp"
#include "gpsens/gp.hpp"
#include "gpsens/laplace.hpp"
#include "gpsens/spectral.hpp"
#include "gpsens/warp.hpp"

namespace gpsens {

enum class EngineKind { Spectral, Warp };
std::string engine_name(EngineKind kind);

struct SpectralEngineOptions {
  int grid_size = 100;
  GridOptions grid;
  SpectralSearchOptions search;  // seed and direction are set by the workflow
  // Seed each epsilon with the previous epsilon's optimum (still feasible in the larger box).
  bool warm_start = true;
};

struct WarpEngineOptions {
  WarpSearchOptions search;  // seed is set by the workflow
  std::vector<std::size_t> flags;
  // Empty means training inputs plus the test point.
  Points regularizer_grid;
  WarpLoss loss;
  bool warm_start = true;
};

struct DiagnosticsOptions {
  int samples = 500;
  VerdictRule rule;
  int n_draws = 4;
  int draw_points = 200;
  LaplaceOptions laplace;
};

struct WorkflowOptions {
  EngineKind engine = EngineKind::Spectral;
  FunctionalSpec functional;
  double delta = 0.0;
  // +1: the decision changes when F* rises to delta; -1: when it falls to delta.
  double direction = 1.0;
  std::vector<double> schedule;
  // A schedule point counts as crossing when direction * F* >= direction * delta - tolerance.
  double crossing_tolerance = 0.0;
  SpectralEngineOptions spectral;
  WarpEngineOptions warp;
  DiagnosticsOptions diagnostics;
  std::uint64_t seed = 0;
};

struct ScheduleEntry {
  double epsilon = 0.0;
  double value = 0.0;  // best F* at this epsilon
  double objective = 0.0;  // warp objective at the best net (warp engine)
  int best_restart = 0;
  bool crossed = false;
  std::vector<SpectralRestart> spectral_restarts;
  std::vector<WarpRestart> warp_restarts;
};

inline constexpr const char* kVerdictNonRobust = "non-robust";
inline constexpr const char* kVerdictFailed = "failed to find non-robustness";
inline constexpr const char* kVerdictNotChanged = "decision not changed within schedule";

struct SensitivityReport {
  EngineKind engine = EngineKind::Spectral;
  FunctionalSpec functional;
  double delta = 0.0;
  double direction = 1.0;
  double crossing_tolerance = 0.0;
  double baseline_value = 0.0;  // F*(k0)
  std::vector<ScheduleEntry> schedule;
  bool crossed = false;
  double k1_epsilon = 0.0;  // crossing epsilon, or the final one on exhaustion
  Kernel k1 = Kernel::squared_exponential(1.0, 1.0);
  double k1_value = 0.0;
  FrobeniusComparison comparison;
  HyperPosterior hyper_posterior;
  NoiseMatchedDraws draws;
  std::vector<std::string> warnings;
  std::string verdict;
};

// crossed & interchangeable -> non-robust; crossed & not interchangeable -> failed to find
// non-robustness; not crossed -> decision not changed within schedule when the final kernel is
// interchangeable, failed to find non-robustness otherwise.
std::string assemble_verdict(bool crossed, bool interchangeable);

// Points where prior draws are compared: the plotting grid for 1-D inputs, otherwise the
// training inputs plus the test point.
Points comparison_points(const FittedGp& gp0, const Vector& x_star, int count);

SensitivityReport run_workflow(const FittedGp& gp0, const WorkflowOptions& options);

}  // namespace gpsens
