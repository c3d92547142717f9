#include "gpsens/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gpsens/error.hpp"
#include "gpsens/render.hpp"

namespace gpsens {

namespace {

MeanFunction mean_from_config(const FitConfig& f) {
  if (f.mean == "constant") return MeanFunction::constant(f.mean_value);
  if (f.mean == "training-mean") return MeanFunction::training_mean();
  return MeanFunction::zero();
}

std::string mean_kind_name(MeanFunction::Kind kind) {
  switch (kind) {
    case MeanFunction::Kind::Constant: return "constant";
    case MeanFunction::Kind::TrainingMean: return "training-mean";
    default: return "zero";
  }
}

Json restart_json(const RestartDiagnostics& d) {
  Json j;
  j["index"] = d.index;
  j["ok"] = d.ok;
  j["log_marginal_likelihood"] = d.log_marginal_likelihood;
  j["gradient_norm"] = d.gradient_norm;
  j["iterations"] = d.iterations;
  j["message"] = d.message;
  return j;
}

}  // namespace

PreparedData prepare_data(const RunConfig& config) {
  PreparedData out;
  if (config.data.source == "synthetic") {
    out.raw = generate_synthetic(config.data.synthetic_seed);
    out.rows = static_cast<std::size_t>(out.raw.size());
  } else {
    LoadedData loaded = load_csv(config.data.path, config.data.format);
    out.raw = std::move(loaded.data);
    out.rows = loaded.rows;
    out.dropped = loaded.dropped;
  }
  Dataset filtered = out.raw;
  if (config.data.x_min || config.data.x_max) {
    filtered = filter_inputs(out.raw, config.data.x_min.value_or(-std::numeric_limits<double>::infinity()),
                             config.data.x_max.value_or(std::numeric_limits<double>::infinity()));
  }
  Preprocessed pre = preprocess(filtered, parse_preprocess_mode(config.preprocess));
  out.training = std::move(pre.data);
  out.transform = pre.transform;
  return out;
}

FitResult fit_from_config(const RunConfig& config, const Dataset& training) {
  FitOptions fo;
  fo.restarts = config.fit.restarts;
  fo.seed = config.seed;
  fo.initial_noise_variance = config.fit.initial_noise_variance;
  fo.fix_noise = config.fit.fix_noise;
  fo.mean = mean_from_config(config.fit);
  fo.optimizer = config.fit.optimizer == "nelder-mead" ? MmleOptimizer::NelderMead : MmleOptimizer::Bfgs;
  fo.max_iterations = config.fit.max_iterations;
  return fit_mmle(training, parse_kernel(config.kernel), fo);
}

FunctionalSpec functional_from_config(const RunConfig& config, const FittedGp& gp0) {
  const Vector& xs = config.functional.x_star;
  switch (parse_functional_kind(config.functional.kind)) {
    case FunctionalKind::PosteriorQuantile:
      return FunctionalSpec::posterior_quantile(xs, config.functional.q, config.functional.include_noise);
    case FunctionalKind::RelativeChange:
      return FunctionalSpec::relative_change(gp0, xs);
    default:
      return FunctionalSpec::posterior_mean(xs);
  }
}

double delta_from_config(const RunConfig& config, const PreparedData& data) {
  double raw = 0.0;
  bool needs_transform = config.delta.units == "raw";
  if (config.delta.observed_at) {
    Eigen::Index best = 0;
    (data.raw.x.col(0).array() - *config.delta.observed_at).abs().minCoeff(&best);
    raw = data.raw.y[best];
    needs_transform = true;
  } else {
    raw = *config.delta.value;
  }
  if (!needs_transform) return raw;
  if (config.functional.kind == "relative-change") {
    throw ConfigError("a relative-change threshold is dimensionless; use delta.value in model units");
  }
  return data.transform.apply(raw);
}

WorkflowOptions workflow_options_from_config(const RunConfig& config, const FittedGp& gp0, const PreparedData& data) {
  WorkflowOptions o;
  o.engine = config.engine.type;
  o.functional = functional_from_config(config, gp0);
  o.delta = delta_from_config(config, data);
  o.direction = config.direction == "below" ? -1.0 : 1.0;
  o.schedule = config.engine.schedule.epsilons();
  o.crossing_tolerance = config.engine.crossing_tolerance.value_or(
      config.engine.type == EngineKind::Warp ? 0.01 * std::abs(o.delta) : 0.0);
  const SpectralConfig& s = config.engine.spectral;
  o.spectral.grid_size = s.grid_size;
  o.spectral.grid.tail_threshold = s.tail_threshold;
  o.spectral.grid.max_frequency = s.max_frequency;
  o.spectral.search.steps = s.steps;
  o.spectral.search.step_size = s.step_size;
  o.spectral.search.step_rule = s.step_rule == "box-scaled" ? AscentStep::BoxScaled : AscentStep::Gradient;
  o.spectral.search.restarts = s.restarts;
  o.spectral.warm_start = s.warm_start;
  const WarpConfig& w = config.engine.warp;
  o.warp.search.hidden = w.hidden;
  o.warp.search.init_scale = w.init_scale;
  o.warp.search.steps = w.steps;
  o.warp.search.step_size = w.step_size;
  o.warp.search.restarts = w.restarts;
  o.warp.warm_start = w.warm_start;
  if (w.flags == "all") {
    o.warp.flags = flags_whole_kernel();
  } else if (w.flags == "nodes") {
    o.warp.flags = w.flag_nodes;
  } else {
    o.warp.flags = flags_except_periodic(gp0.kernel());
  }
  o.warp.regularizer_grid = w.regularizer_grid;
  o.diagnostics.samples = config.diagnostics.samples;
  o.diagnostics.rule =
      config.diagnostics.rule == "quantile" ? VerdictRule::quantile(config.diagnostics.q) : VerdictRule::max();
  o.diagnostics.n_draws = config.diagnostics.draws;
  o.diagnostics.draw_points = config.diagnostics.draw_points;
  o.seed = config.seed;
  return o;
}

Json fit_to_json(const FitResult& fit) {
  const FittedGp& gp = fit.gp;
  Json j;
  j["kernel"] = kernel_to_json(gp.kernel());
  j["noise_variance"] = gp.noise_variance();
  j["noise_fixed"] = gp.noise_fixed;
  Json mean;
  mean["kind"] = mean_kind_name(gp.mean_function().kind);
  mean["value"] = gp.mean_function().value;
  j["mean"] = mean;
  j["log_marginal_likelihood"] = gp.log_marginal_likelihood;
  j["gradient_norm"] = gp.gradient_norm;
  j["best_restart"] = fit.best_restart;
  Json rs = Json::array();
  for (const RestartDiagnostics& d : fit.restarts) rs.push_back(restart_json(d));
  j["restarts"] = rs;
  return j;
}

FittedGp gp_from_fit_json(const Json& j, const Dataset& training) {
  const Kernel k = kernel_from_json(j.at("kernel"));
  const double noise = j.at("noise_variance").get<double>();
  MeanFunction mean;
  if (j.contains("mean")) {
    const std::string kind = j.at("mean").at("kind").get<std::string>();
    const double value = j.at("mean").at("value").get<double>();
    mean = kind == "zero" ? MeanFunction::zero() : MeanFunction::constant(value);
  }
  FittedGp gp(training, k, noise, mean);
  if (j.contains("noise_fixed")) gp.noise_fixed = j.at("noise_fixed").get<bool>();
  gp.log_marginal_likelihood = log_marginal_likelihood(training, k, noise, mean);
  return gp;
}

int exit_code_for_verdict(const std::string& verdict) {
  return verdict == kVerdictNonRobust ? kExitNonRobust : kExitOk;
}

RunOutputs run_from_config(const RunConfig& config) {
  config.validate();
  const PreparedData data = prepare_data(config);
  const FitResult fit = fit_from_config(config, data.training);
  const FittedGp& gp0 = fit.gp;
  const WorkflowOptions options = workflow_options_from_config(config, gp0, data);
  const SensitivityReport report = run_workflow(gp0, options);

  RunOutputs out;
  out.verdict = report.verdict;
  out.exit_code = exit_code_for_verdict(report.verdict);
  Json j;
  j["schema"] = kReportSchema;
  j["config"] = config_to_json(config);
  Json dj;
  dj["rows"] = data.rows;
  dj["dropped"] = data.dropped;
  dj["training_size"] = data.training.size();
  Json tj;
  tj["mode"] = preprocess_mode_name(data.transform.mode);
  tj["shift"] = data.transform.shift;
  tj["scale"] = data.transform.scale;
  dj["transform"] = tj;
  j["data"] = dj;
  j["fit"] = fit_to_json(fit);
  const Json workflow_json = report_to_json(report, gp0.kernel());
  for (auto& [key, value] : workflow_json.items()) {
    if (key != "schema") j[key] = value;
  }
  if (options.functional.kind != FunctionalKind::RelativeChange && data.transform.mode != PreprocessMode::None) {
    Json raw;
    raw["delta"] = data.transform.invert(report.delta);
    raw["baseline_value"] = data.transform.invert(report.baseline_value);
    raw["k1_value"] = data.transform.invert(report.k1_value);
    j["raw_scale"] = raw;
  }
  out.report = std::move(j);
  if (report.draws.points.cols() == 1) out.draws = draw_report(report.draws);
  out.histogram = histogram_report(report.comparison);
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << text;
  if (!f) throw InputError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void write_outputs(const RunOutputs& outputs, const std::string& directory, bool render_plots) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw InputError("cannot create output directory '" + directory + "': " + ec.message());
  const fs::path dir(directory);
  write_text_file((dir / "report.json").string(), dump_json(outputs.report));
  write_text_file((dir / "histogram.csv").string(), emit_plot_csv(outputs.histogram));
  if (!outputs.draws.empty()) write_text_file((dir / "draws.csv").string(), emit_plot_csv(outputs.draws));
  if (render_plots) {
    write_text_file((dir / "histogram.svg").string(), render_histogram_svg(outputs.histogram));
    if (!outputs.draws.empty()) write_text_file((dir / "draws.svg").string(), render_draws_svg(outputs.draws));
  }
}

}  // namespace gpsens
