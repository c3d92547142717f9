#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gpsens/config.hpp"
#include "gpsens/error.hpp"
#include "gpsens/json_io.hpp"
#include "gpsens/laplace.hpp"
#include "gpsens/log.hpp"
#include "gpsens/render.hpp"
#include "gpsens/run.hpp"

using namespace gpsens;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool render = false;
  std::string direction;
};

RunConfig effective_config(const Common& c) {
  if (c.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output = c.out;
  if (!c.direction.empty()) cfg.direction = c.direction;
  cfg.validate();
  return cfg;
}

std::filesystem::path out_dir(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.output);
  return cfg.output;
}

void add_common(CLI::App* sub, Common& c, bool with_plots) {
  sub->add_option("--config", c.config, "run configuration (JSON)")->required();
  sub->add_option("--seed", c.seed, "override the configuration seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--direction", c.direction, "decision side: above or below")
      ->check(CLI::IsMember({"above", "below"}));
  if (with_plots) sub->add_flag("--render-plots", c.render, "also write SVG figures");
}

int cmd_fit(const Common& c) {
  const RunConfig cfg = effective_config(c);
  const PreparedData data = prepare_data(cfg);
  const FitResult fit = fit_from_config(cfg, data.training);
  Json j = fit_to_json(fit);
  const HyperPosterior hp = laplace_hyper_posterior(fit.gp);
  Json lap;
  lap["mode"] = vector_to_json(hp.mode);
  lap["covariance"] = matrix_to_json(hp.covariance);
  lap["warnings"] = hp.warnings;
  j["laplace"] = lap;
  j["config"] = config_to_json(cfg);
  const auto path = out_dir(cfg) / "fit.json";
  write_text_file(path.string(), dump_json(j));
  std::cout << fit.gp.kernel().to_string() << "  noise " << fit.gp.noise_variance() << "  lml "
            << fit.gp.log_marginal_likelihood << "\n";
  return kExitOk;
}

int cmd_perturb(const Common& c, double epsilon) {
  RunConfig cfg = effective_config(c);
  cfg.engine.schedule.spacing = "list";
  cfg.engine.schedule.values = {epsilon};
  cfg.validate();
  const PreparedData data = prepare_data(cfg);
  const FitResult fit = fit_from_config(cfg, data.training);
  WorkflowOptions o = workflow_options_from_config(cfg, fit.gp, data);
  Json j;
  j["config"] = config_to_json(cfg);
  j["epsilon"] = epsilon;
  j["baseline_value"] = evaluate_functional(fit.gp, o.functional);
  if (o.engine == EngineKind::Spectral) {
    const Vector freqs = default_grid(fit.gp.kernel(), o.spectral.grid_size, o.spectral.grid);
    SpectralSearchOptions so = o.spectral.search;
    so.seed = o.seed;
    so.direction = o.direction;
    const SpectralSearchResult r =
        maximize_spectral(fit.gp, o.functional, SpectralBox{density_of_kernel(fit.gp.kernel(), freqs), epsilon}, so);
    j["value"] = r.value;
    j["best_restart"] = r.best_restart;
    j["kernel"] = kernel_to_json(kernel_from_density(r.best));
  } else {
    WarpObjectiveSpec spec;
    spec.functional = o.functional;
    spec.delta = o.delta;
    spec.regularizer_grid = o.warp.regularizer_grid.rows() > 0 ? o.warp.regularizer_grid
                                                               : default_regularizer_grid(fit.gp, o.functional.x_star);
    spec.epsilon = epsilon;
    spec.flags = o.warp.flags;
    WarpSearchOptions wo = o.warp.search;
    wo.seed = o.seed;
    const WarpSearchResult r = minimize_warp(fit.gp, spec, wo);
    j["value"] = r.functional;
    j["objective"] = r.objective;
    j["best_restart"] = r.best_restart;
    j["kernel"] = kernel_to_json(warped_kernel(fit.gp.kernel(), std::make_shared<const WarpNet>(r.net), spec.flags));
  }
  const auto path = out_dir(cfg) / "perturb.json";
  write_text_file(path.string(), dump_json(j));
  std::cout << "epsilon " << epsilon << ": F* = " << j["value"].get<double>() << "\n";
  return kExitOk;
}

int cmd_workflow(const Common& c) {
  const RunConfig cfg = effective_config(c);
  const RunOutputs out = run_from_config(cfg);
  write_outputs(out, cfg.output, c.render);
  std::cout << out.verdict << "\n";
  return out.exit_code;
}

int cmd_diagnose(const Common& c, const std::string& k0_path, const std::string& k1_path) {
  const RunConfig cfg = effective_config(c);
  const PreparedData data = prepare_data(cfg);
  const Json fit_json = parse_json(read_text_file(k0_path), k0_path);
  const FittedGp gp0 = gp_from_fit_json(fit_json, data.training);
  const Json k1_json = parse_json(read_text_file(k1_path), k1_path);
  const Json& k1_node = k1_json.contains("k1") ? k1_json.at("k1").at("kernel")
                        : k1_json.contains("kernel") ? k1_json.at("kernel")
                                                     : k1_json;
  const Kernel k1 = kernel_from_json(k1_node);
  const WorkflowOptions o = workflow_options_from_config(cfg, gp0, data);
  const HyperPosterior hp = laplace_hyper_posterior(gp0, o.diagnostics.laplace);
  const FrobeniusComparison cmp = frobenius_histogram(gp0, k1, hp, o.diagnostics.samples, o.seed, o.diagnostics.rule);
  const Points pts = comparison_points(gp0, o.functional.x_star, o.diagnostics.draw_points);
  const NoiseMatchedDraws draws = noise_matched_draws({gp0.kernel(), k1}, {"k0", "k1"}, pts, o.diagnostics.n_draws, o.seed);
  Json j;
  j["config"] = config_to_json(cfg);
  j["rule"] = cmp.rule.name();
  j["reference_norm"] = cmp.reference_norm;
  j["candidate"] = cmp.candidate;
  j["threshold"] = cmp.threshold;
  j["verdict"] = cmp.interchangeable ? "interchangeable" : "not interchangeable";
  j["samples"] = cmp.samples;
  const auto dir = out_dir(cfg);
  write_text_file((dir / "diagnose.json").string(), dump_json(j));
  const PlotData hist = histogram_report(cmp);
  write_text_file((dir / "histogram.csv").string(), emit_plot_csv(hist));
  if (pts.cols() == 1) {
    const PlotData d = draw_report(draws);
    write_text_file((dir / "draws.csv").string(), emit_plot_csv(d));
    if (c.render) write_text_file((dir / "draws.svg").string(), render_draws_svg(d));
  }
  if (c.render) write_text_file((dir / "histogram.svg").string(), render_histogram_svg(hist));
  std::cout << j["verdict"].get<std::string>() << "\n";
  return kExitOk;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const InputError*>(&e)) return "input";
  if (dynamic_cast<const ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const NumericalError*>(&e)) return "numerical";
  if (dynamic_cast<const UnsupportedError*>(&e)) return "unsupported";
  if (dynamic_cast<const FitError*>(&e)) return "fit";
  if (dynamic_cast<const OptimizationError*>(&e)) return "optimization";
  if (dynamic_cast<const PreconditionError*>(&e)) return "precondition";
  return "internal";
}

int report_error(const std::exception& e) {
  Json j;
  j["error"] = error_kind(e);
  j["message"] = e.what();
  std::cerr << dump_json(j, 0);
  return kExitError;
}

int cmd_synth(std::uint64_t seed, const std::string& out) {
  const Dataset d = generate_synthetic(seed);
  std::string text = "x,y\n";
  char buf[64];
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.x(i, 0), d.y[i]);
    text += buf;
  }
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    write_text_file(out, text);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel-choice sensitivity analysis for Gaussian-process decisions"};
  app.require_subcommand(1);
  Common common;
  double epsilon = 0.0;
  std::string k0_path, k1_path;
  std::uint64_t synth_seed = 0;
  std::string synth_out;

  auto* fit = app.add_subcommand("fit", "fit the kernel hyperparameters by maximum marginal likelihood");
  add_common(fit, common, false);
  auto* perturb = app.add_subcommand("perturb", "search one neighbourhood size");
  add_common(perturb, common, false);
  perturb->add_option("--epsilon", epsilon, "neighbourhood size")->required()->check(CLI::NonNegativeNumber);
  auto* workflow = app.add_subcommand("workflow", "run the full robustness workflow");
  add_common(workflow, common, true);
  auto* diagnose = app.add_subcommand("diagnose", "compare two kernels");
  add_common(diagnose, common, true);
  diagnose->add_option("--k0", k0_path, "fit.json written by 'fit'")->required();
  diagnose->add_option("--k1", k1_path, "kernel JSON, perturb.json or report.json")->required();
  auto* synth = app.add_subcommand("synth", "write the synthetic benchmark data as CSV");
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitError;
  }

  try {
    if (*fit) return cmd_fit(common);
    if (*perturb) return cmd_perturb(common, epsilon);
    if (*workflow) return cmd_workflow(common);
    if (*diagnose) return cmd_diagnose(common, k0_path, k1_path);
    if (*synth) return cmd_synth(synth_seed, synth_out);
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kExitError;
}
