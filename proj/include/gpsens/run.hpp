#pragma once

#include <string>

#include "gpsens/config.hpp"
#include "gpsens/diagnostics.hpp"
#include "gpsens/mmle.hpp"
#include "gpsens/workflow.hpp"

namespace gpsens {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNonRobust = 10;
inline constexpr int kExitError = 1;

struct PreparedData {
  Dataset raw;       // as loaded, before filtering
  Dataset training;  // filtered and preprocessed
  Transform transform;
  std::size_t rows = 0;
  std::size_t dropped = 0;
};

PreparedData prepare_data(const RunConfig& config);
FitResult fit_from_config(const RunConfig& config, const Dataset& training);
FunctionalSpec functional_from_config(const RunConfig& config, const FittedGp& gp0);
double delta_from_config(const RunConfig& config, const PreparedData& data);
WorkflowOptions workflow_options_from_config(const RunConfig& config, const FittedGp& gp0, const PreparedData& data);

Json fit_to_json(const FitResult& fit);
// Rebuilds the GP described by fit_to_json on the given training data (no refit).
FittedGp gp_from_fit_json(const Json& j, const Dataset& training);

struct RunOutputs {
  Json report;
  PlotData draws;
  PlotData histogram;
  std::string verdict;
  int exit_code = kExitOk;
};

int exit_code_for_verdict(const std::string& verdict);

// fit -> workflow -> report; nothing is written.
RunOutputs run_from_config(const RunConfig& config);
// report.json, draws.csv, histogram.csv and, with render_plots, draws.svg and histogram.svg.
void write_outputs(const RunOutputs& outputs, const std::string& directory, bool render_plots);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace gpsens
