#include "gpsens/warp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

Kernel rebuild(const Kernel& k, std::size_t& index, const std::set<std::size_t>& flags,
               const std::shared_ptr<const WarpNet>& net, bool inside_flag) {
  const std::size_t here = index++;
  const bool flagged = flags.count(here) > 0;
  if (flagged && inside_flag) throw ValidationError("warp flags may not nest (node " + std::to_string(here) + ")");
  if (flagged && k.contains(KernelKind::Spectral)) {
    throw ValidationError("cannot warp a spectral kernel node (node " + std::to_string(here) + ")");
  }
  if (flagged && k.contains(KernelKind::Warped)) {
    throw ValidationError("node " + std::to_string(here) + " is already warped");
  }
  if (k.is_leaf()) {
    return flagged ? Kernel::warped(k, net) : k;
  }
  if (k.kind() == KernelKind::Warped) {
    std::size_t skip = k.node_count() - 1;
    index += skip;
    for (std::size_t f : flags) {
      if (f > here && f <= here + skip) throw ValidationError("cannot warp inside an existing warped node");
    }
    return k;
  }
  std::vector<Kernel> kids;
  for (const Kernel& c : k.children()) kids.push_back(rebuild(c, index, flags, net, inside_flag || flagged));
  Kernel out = k.kind() == KernelKind::Sum ? Kernel::sum(std::move(kids)) : Kernel::product(std::move(kids));
  return flagged ? Kernel::warped(out, net) : out;
}

double grid_regularizer(const WarpObjectiveSpec& spec, const WarpNet& net, Points* offsets) {
  Points h = net.offsets(spec.regularizer_grid);
  const double value = h.squaredNorm() / (spec.epsilon * static_cast<double>(h.rows()));
  if (offsets) *offsets = std::move(h);
  return value;
}

struct LossPartials {
  double value;
  double d_mean;
  double d_variance;
  double functional;
};

LossPartials loss_partials(const WarpObjectiveSpec& spec, const PointPosterior& post, double noise) {
  const FunctionalValue fv = functional_from_posterior(spec.functional, post, noise);
  if (spec.loss.kind == WarpLoss::Kind::ThresholdSquared) {
    const double r = fv.value - spec.delta;
    return {r * r, 2.0 * r * fv.d_mean, 2.0 * r * fv.d_variance, fv.value};
  }
  const double s = post.std();
  const LossValue lv = spec.loss.hook(post.mean, s, spec.delta);
  const double dvar = s > 0.0 ? lv.d_std / (2.0 * s) : 0.0;
  return {lv.value, lv.d_mean, dvar, fv.value};
}

std::uint64_t restart_seed(std::uint64_t seed, int r) {
  std::seed_seq seq{seed, static_cast<std::uint64_t>(r)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

}  // namespace

Kernel warped_kernel(const Kernel& k0, std::shared_ptr<const WarpNet> net, const std::vector<std::size_t>& flags) {
  if (!net) throw ValidationError("warped kernel needs a warp network");
  const std::size_t n = k0.node_count();
  for (std::size_t f : flags) {
    if (f >= n) throw ValidationError("warp flag " + std::to_string(f) + " does not name a kernel node");
  }
  std::set<std::size_t> set(flags.begin(), flags.end());
  std::size_t index = 0;
  return rebuild(k0, index, set, net, false);
}

std::vector<std::size_t> flags_except_periodic(const Kernel& k0) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < k0.node_count(); ++i) {
    const Kernel& node = k0.node(i);
    if (node.is_leaf() && node.kind() != KernelKind::Periodic && node.kind() != KernelKind::Spectral) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> flags_whole_kernel() { return {0}; }

void WarpObjectiveSpec::validate(int dim) const {
  functional.validate();
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("warp epsilon must be finite and > 0");
  if (regularizer_grid.rows() < 1) throw ValidationError("warp regularizer grid needs at least one point");
  if (regularizer_grid.cols() != dim) throw InputError("warp regularizer grid has the wrong dimension");
  if (!regularizer_grid.allFinite()) throw InputError("warp regularizer grid has non-finite points");
  if (flags.empty()) throw ValidationError("at least one kernel node must be flagged for warping");
  if (!std::isfinite(delta)) throw ValidationError("threshold must be finite");
  if (loss.kind == WarpLoss::Kind::Custom && !loss.hook) throw ValidationError("custom warp loss needs a hook");
}

Points default_regularizer_grid(const FittedGp& gp0, const Vector& x_star) {
  const Points& x = gp0.data().x;
  Points grid(x.rows() + 1, x.cols());
  grid.topRows(x.rows()) = x;
  grid.row(x.rows()) = x_star.transpose();
  return grid;
}

WarpEvaluation evaluate_warp(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpNet& net) {
  const int dim = static_cast<int>(gp0.data().dim());
  spec.validate(dim);
  if (net.dim() != dim) throw InputError("warp network dimension does not match the data");
  auto shared = std::make_shared<const WarpNet>(net);
  const FittedGp gp = gp0.with_kernel(warped_kernel(gp0.kernel(), shared, spec.flags));
  const PointPosterior post = gp.posterior(spec.functional.x_star);
  const LossPartials lp = loss_partials(spec, post, gp.noise_variance());
  const double reg = grid_regularizer(spec, net, nullptr);
  return {lp.value + reg, lp.value, reg, lp.functional, post};
}

double warp_objective(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpNet& net) {
  return evaluate_warp(gp0, spec, net).objective;
}

Vector warp_gradient(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpNet& net,
                     WarpEvaluation* evaluation) {
  const int dim = static_cast<int>(gp0.data().dim());
  spec.validate(dim);
  if (net.dim() != dim) throw InputError("warp network dimension does not match the data");
  auto shared = std::make_shared<const WarpNet>(net);
  const Kernel kw = warped_kernel(gp0.kernel(), shared, spec.flags);
  const FittedGp gp = gp0.with_kernel(kw);
  const Points& x = gp0.data().x;
  const Points xs = spec.functional.x_star.transpose();
  const Points u = net.warp(x);
  const Points us = net.warp(xs);

  const RoutedGram train = routed_gram(kw, x, u, x, u, true);
  const RoutedGram cross = routed_gram(kw, xs, us, x, u, false);
  const Vector kstar = cross.value.row(0).transpose();
  const PointPosterior post = gp.posterior(spec.functional.x_star);
  const LossPartials lp = loss_partials(spec, post, gp.noise_variance());
  const PosteriorAdjoint adj = posterior_adjoint(gp, kstar, lp.d_mean, lp.d_variance);

  const Eigen::Index n = x.rows();
  Points a = Points::Zero(n, dim);
  Points a_star = Points::Zero(1, dim);
  for (int d = 0; d < dim; ++d) {
    const Matrix& lg = train.left_grad[d];
    const Matrix weighted = adj.d_gram.cwiseProduct(lg);
    // entry (i, j) moves with u_i through the left slot and with u_j through the right slot
    a.col(d) = weighted.rowwise().sum() - weighted.colwise().sum().transpose();
    const Vector lc = cross.left_grad[d].row(0).transpose();
    a.col(d) -= adj.d_cross.cwiseProduct(lc);
    a_star(0, d) = adj.d_cross.dot(lc);
  }
  Points offsets;
  const double reg = grid_regularizer(spec, net, &offsets);
  const Points reg_up = (2.0 / (spec.epsilon * static_cast<double>(offsets.rows()))) * offsets;

  // dg/dw = dh/dw, so the warped-input adjoints feed straight into the network.
  Vector grad = net.backprop(x, a) + net.backprop(xs, a_star) + net.backprop(spec.regularizer_grid, reg_up);
  if (evaluation) *evaluation = {lp.value + reg, lp.value, reg, lp.functional, post};
  return grad;
}

WarpRestart descend_warp(const FittedGp& gp0, const WarpObjectiveSpec& spec, WarpNet& net,
                         const WarpSearchOptions& options) {
  WarpRestart out;
  WarpEvaluation ev{};
  Vector grad;
  try {
    grad = warp_gradient(gp0, spec, net, &ev);
  } catch (const NumericalError& e) {
    out.status = std::string("diverged: ") + e.what();
    out.start_objective = out.objective = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  if (!std::isfinite(ev.objective) || !grad.allFinite()) {
    out.status = "diverged: non-finite objective at the start";
    out.start_objective = out.objective = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.start_objective = ev.objective;
  out.trace.push_back(ev.objective);
  out.status = "step limit";
  double f = ev.objective;
  double functional = ev.functional;
  double eta = options.step_size;
  Vector w = net.parameters();
  int step = 0;
  for (; step < options.steps; ++step) {
    if (f <= options.objective_tolerance) {
      out.status = "objective tolerance";
      break;
    }
    const double gnorm = grad.norm();
    if (!(gnorm > 0.0)) {
      out.status = "stationary point";
      break;
    }
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, eta *= 0.5) {
      const Vector cand = w - (eta / gnorm) * grad;
      WarpNet trial = net;
      trial.set_parameters(cand);
      WarpEvaluation tev{};
      Vector tgrad;
      try {
        tgrad = warp_gradient(gp0, spec, trial, &tev);
      } catch (const NumericalError&) {
        continue;
      }
      if (std::isfinite(tev.objective) && tev.objective <= f && tgrad.allFinite()) {
        w = cand;
        net = std::move(trial);
        f = tev.objective;
        functional = tev.functional;
        grad = std::move(tgrad);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.status = "converged";
      break;
    }
    out.trace.push_back(f);
    eta = std::min(2.0 * eta, options.step_size);
  }
  out.steps = step;
  out.objective = f;
  out.functional = functional;
  return out;
}

WarpSearchResult minimize_warp(const FittedGp& gp0, const WarpObjectiveSpec& spec, const WarpSearchOptions& options) {
  const int dim = static_cast<int>(gp0.data().dim());
  spec.validate(dim);
  if (options.restarts < 1) throw ValidationError("warp search needs at least one restart");
  if (!(options.step_size > 0.0)) throw ValidationError("warp step size must be positive");
  WarpSearchResult result;
  double best = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    WarpNet net = WarpNet::random(dim, options.hidden, options.init_scale, restart_seed(options.seed, r));
    WarpRestart diag = descend_warp(gp0, spec, net, options);
    diag.index = r;
    diag.origin = "random";
    if (std::isfinite(diag.objective) && diag.objective < best) {
      best = diag.objective;
      result.net = net;
      result.objective = diag.objective;
      result.functional = diag.functional;
      result.best_restart = r;
    }
    result.restarts.push_back(std::move(diag));
  }
  for (std::size_t w = 0; w < options.warm_starts.size(); ++w) {
    WarpNet net = options.warm_starts[w];
    if (net.dim() != dim) throw InputError("warm-start network has the wrong dimension");
    WarpRestart diag = descend_warp(gp0, spec, net, options);
    diag.index = options.restarts + static_cast<int>(w);
    diag.origin = "warm";
    if (std::isfinite(diag.objective) && diag.objective < best) {
      best = diag.objective;
      result.net = net;
      result.objective = diag.objective;
      result.functional = diag.functional;
      result.best_restart = diag.index;
    }
    result.restarts.push_back(std::move(diag));
  }
  if (!std::isfinite(best)) {
    std::string msg = "every warp restart diverged:";
    for (const WarpRestart& d : result.restarts) msg += " [" + std::to_string(d.index) + "] " + d.status + ";";
    throw OptimizationError(msg);
  }
  return result;
}

}  // namespace gpsens
