#include "gpsens/workflow.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "gpsens/error.hpp"
#include "gpsens/log.hpp"

namespace gpsens {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_options(const WorkflowOptions& o) {
  o.functional.validate();
  if (o.schedule.empty()) throw ValidationError("epsilon schedule is empty");
  for (std::size_t i = 0; i < o.schedule.size(); ++i) {
    if (!(o.schedule[i] >= 0.0) || !std::isfinite(o.schedule[i])) throw ValidationError("epsilon values must be finite and >= 0");
    if (i > 0 && !(o.schedule[i] > o.schedule[i - 1])) throw ValidationError("epsilon schedule must be strictly increasing");
  }
  if (o.engine == EngineKind::Warp && o.schedule.front() <= 0.0) throw ValidationError("warp epsilon values must be > 0");
  if (o.direction != 1.0 && o.direction != -1.0) throw ValidationError("direction must be +1 or -1");
  if (!std::isfinite(o.delta)) throw ValidationError("threshold must be finite");
  if (!(o.crossing_tolerance >= 0.0)) throw ValidationError("crossing tolerance must be >= 0");
}

}  // namespace

std::string engine_name(EngineKind kind) { return kind == EngineKind::Spectral ? "spectral" : "warp"; }

std::string assemble_verdict(bool crossed, bool interchangeable) {
  if (crossed) return interchangeable ? kVerdictNonRobust : kVerdictFailed;
  return interchangeable ? kVerdictNotChanged : kVerdictFailed;
}

Points comparison_points(const FittedGp& gp0, const Vector& x_star, int count) {
  const Points& x = gp0.data().x;
  if (x.cols() == 1) return draw_grid(x, x_star, count);
  Points out(x.rows() + 1, x.cols());
  out.topRows(x.rows()) = x;
  out.row(x.rows()) = x_star.transpose();
  return out;
}

SensitivityReport run_workflow(const FittedGp& gp0, const WorkflowOptions& options) {
  check_options(options);
  const double dir = options.direction;
  SensitivityReport report;
  report.engine = options.engine;
  report.functional = options.functional;
  report.delta = options.delta;
  report.direction = dir;
  report.crossing_tolerance = options.crossing_tolerance;
  report.baseline_value = evaluate_functional(gp0, options.functional);
  if (dir * report.baseline_value >= dir * options.delta) {
    throw PreconditionError("F*(k0) = " + fmt(report.baseline_value) + " is already " + (dir > 0 ? ">=" : "<=") +
                            " the threshold " + fmt(options.delta) +
                            "; flip the decision direction (search -F* against -threshold)");
  }
  auto crosses = [&](double v) { return dir * v >= dir * options.delta - options.crossing_tolerance; };

  std::optional<SpectralGrid> reference;
  std::vector<Vector> spectral_warm;
  std::vector<WarpNet> warp_warm;
  Points reg_grid;
  if (options.engine == EngineKind::Spectral) {
    const Vector freqs = default_grid(gp0.kernel(), options.spectral.grid_size, options.spectral.grid);
    reference = density_of_kernel(gp0.kernel(), freqs);
  } else {
    reg_grid = options.warp.regularizer_grid.rows() > 0 ? options.warp.regularizer_grid
                                                        : default_regularizer_grid(gp0, options.functional.x_star);
  }

  std::optional<Kernel> k1;
  double k1_value = 0.0;
  double previous = -std::numeric_limits<double>::infinity();
  for (double eps : options.schedule) {
    ScheduleEntry entry;
    entry.epsilon = eps;
    Kernel best_kernel = gp0.kernel();
    if (options.engine == EngineKind::Spectral) {
      SpectralSearchOptions so = options.spectral.search;
      so.seed = options.seed;
      so.direction = dir;
      so.warm_starts = spectral_warm;
      const SpectralSearchResult r = maximize_spectral(gp0, options.functional, SpectralBox{*reference, eps}, so);
      entry.value = r.value;
      entry.best_restart = r.best_restart;
      entry.spectral_restarts = r.restarts;
      best_kernel = kernel_from_density(r.best);
      if (options.spectral.warm_start) spectral_warm = {r.best.density};
    } else {
      WarpObjectiveSpec spec;
      spec.functional = options.functional;
      spec.delta = options.delta;
      spec.loss = options.warp.loss;
      spec.regularizer_grid = reg_grid;
      spec.epsilon = eps;
      spec.flags = options.warp.flags;
      WarpSearchOptions wo = options.warp.search;
      wo.seed = options.seed;
      wo.warm_starts = warp_warm;
      const WarpSearchResult r = minimize_warp(gp0, spec, wo);
      entry.value = r.functional;
      entry.objective = r.objective;
      entry.best_restart = r.best_restart;
      entry.warp_restarts = r.restarts;
      best_kernel = warped_kernel(gp0.kernel(), std::make_shared<const WarpNet>(r.net), spec.flags);
      if (options.warp.warm_start) warp_warm = {r.net};
    }
    entry.crossed = crosses(entry.value);
    if (dir * entry.value < previous - 1e-6) {
      report.warnings.push_back("optimizer failure: best F* at epsilon " + fmt(eps) + " (" + fmt(entry.value) +
                                ") is worse than at the previous epsilon");
    }
    previous = std::max(previous, dir * entry.value);
    log_info("epsilon " + fmt(eps) + ": best F* " + fmt(entry.value));
    report.schedule.push_back(std::move(entry));
    k1 = best_kernel;
    k1_value = report.schedule.back().value;
    report.k1_epsilon = eps;
    if (report.schedule.back().crossed) {
      report.crossed = true;
      break;
    }
  }
  report.k1 = *k1;
  report.k1_value = k1_value;

  const DiagnosticsOptions& d = options.diagnostics;
  report.hyper_posterior = laplace_hyper_posterior(gp0, d.laplace);
  for (const std::string& w : report.hyper_posterior.warnings) report.warnings.push_back(w);
  report.comparison = frobenius_histogram(gp0, report.k1, report.hyper_posterior, d.samples, options.seed, d.rule);
  const Points pts = comparison_points(gp0, options.functional.x_star, d.draw_points);
  report.draws = noise_matched_draws({gp0.kernel(), report.k1}, {"k0", "k1"}, pts, d.n_draws, options.seed);
  report.verdict = assemble_verdict(report.crossed, report.comparison.interchangeable);
  return report;
}

}  // namespace gpsens
