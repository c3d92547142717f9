#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gpsens/data.hpp"
#include "gpsens/json_io.hpp"
#include "gpsens/spectral.hpp"
#include "gpsens/workflow.hpp"

namespace gpsens {

struct DataConfig {
  std::string source = "synthetic";  // "synthetic" or "csv"
  std::uint64_t synthetic_seed = 0;
  std::string path;
  CsvFormat format = CsvFormat::Generic;
  // Training rows keep first inputs in [x_min, x_max).
  std::optional<double> x_min;
  std::optional<double> x_max;
};

struct FitConfig {
  int restarts = 5;
  double initial_noise_variance = 0.1;
  bool fix_noise = false;
  std::string mean = "zero";  // zero | constant | training-mean
  double mean_value = 0.0;
  std::string optimizer = "bfgs";  // bfgs | nelder-mead
  int max_iterations = 500;
};

struct FunctionalConfig {
  std::string kind = "posterior-mean";
  Vector x_star;
  double q = 0.95;
  bool include_noise = false;
};

struct DeltaConfig {
  std::optional<double> value;
  // Use the raw observation whose input is closest to this value (before filtering).
  std::optional<double> observed_at;
  std::string units = "model";  // model | raw (raw values go through the preprocessing transform)
};

struct ScheduleConfig {
  std::string spacing = "list";  // list | linear | log10
  std::vector<double> values;    // list
  double from = 0.0;
  double to = 0.0;
  int count = 0;

  std::vector<double> epsilons() const;
};

struct SpectralConfig {
  int grid_size = 100;
  std::optional<double> max_frequency;
  double tail_threshold = 1e-15;
  int steps = 500;
  double step_size = 0.1;
  std::string step_rule = "gradient";  // gradient | box-scaled
  int restarts = 25;
  bool warm_start = true;
};

struct WarpConfig {
  std::vector<int> hidden{50, 50};
  double init_scale = 0.1;
  int steps = 200;
  double step_size = 0.05;
  int restarts = 5;
  // "except-periodic", "all", or explicit preorder node indices.
  std::string flags = "except-periodic";
  std::vector<std::size_t> flag_nodes;
  // Empty: training inputs plus the test point.
  Matrix regularizer_grid;
  bool warm_start = true;
};

struct EngineConfig {
  EngineKind type = EngineKind::Spectral;
  ScheduleConfig schedule;
  // Default: 0 for the spectral engine, 1% of |delta| for the warp engine.
  std::optional<double> crossing_tolerance;
  SpectralConfig spectral;
  WarpConfig warp;
};

struct DiagnosticsConfig {
  int samples = 500;
  std::string rule = "max";  // max | quantile
  double q = 0.95;
  int draws = 4;
  int draw_points = 200;
};

struct RunConfig {
  DataConfig data;
  std::string preprocess = "none";
  std::string kernel = "se";
  FitConfig fit;
  FunctionalConfig functional;
  DeltaConfig delta;
  std::string direction = "above";
  EngineConfig engine;
  DiagnosticsConfig diagnostics;
  std::uint64_t seed = 0;
  std::string output = "gpsens-out";

  // Semantic checks beyond the schema (positivity, ranges, consistency).
  void validate() const;
};

// Strict: unknown keys are rejected at every level. Missing keys take their defaults.
RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);
// The effective configuration with every default filled in.
Json config_to_json(const RunConfig& c);

}  // namespace gpsens
