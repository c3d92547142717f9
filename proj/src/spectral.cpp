#include "gpsens/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

constexpr double kPi = std::numbers::pi;

void require_spectral_ready(const Kernel& k) {
  if (!k.is_stationary()) throw ValidationError("spectral density requires a stationary kernel (no warped nodes)");
}

Vector density_impl(const Kernel& k, const Vector& w) {
  const auto& p = k.params();
  switch (k.kind()) {
    case KernelKind::SquaredExponential: {
      // two-sided: h^2 sqrt(2 pi) l exp(-2 pi^2 l^2 w^2)
      const double h2 = p[0] * p[0];
      const double l = p[1];
      return (2.0 * h2 * std::sqrt(2.0 * kPi) * l * (-2.0 * kPi * kPi * l * l * w.array().square()).exp()).matrix();
    }
    case KernelKind::Matern52: {
      // two-sided: h^2 (16/3) 5^{5/2} l^-5 (5/l^2 + 4 pi^2 w^2)^-3
      const double h2 = p[0] * p[0];
      const double l = p[1];
      const double c = h2 * (16.0 / 3.0) * std::pow(5.0, 2.5) / std::pow(l, 5.0);
      return (2.0 * c * (5.0 / (l * l) + 4.0 * kPi * kPi * w.array().square()).pow(-3.0)).matrix();
    }
    case KernelKind::Sum: {
      Vector out = Vector::Zero(w.size());
      for (const Kernel& c : k.children()) out += density_impl(c, w);
      return out;
    }
    default:
      return numeric_density_values(k, w);
  }
}

}  // namespace

void SpectralBox::validate() const {
  reference.validate();
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be finite and >= 0");
}

Vector SpectralBox::lower() const { return ((1.0 - epsilon) * reference.density).cwiseMax(0.0); }

Vector SpectralBox::upper() const { return (1.0 + epsilon) * reference.density; }

Vector SpectralBox::clip(const Vector& density) const { return density.cwiseMax(lower()).cwiseMin(upper()); }

bool SpectralBox::contains(const Vector& density) const {
  const Vector lo = lower();
  const Vector hi = upper();
  for (Eigen::Index g = 0; g < density.size(); ++g) {
    if (density[g] < lo[g] || density[g] > hi[g]) return false;
  }
  return true;
}

Vector numeric_density_values(const Kernel& k, const Vector& frequencies) {
  require_spectral_ready(k);
  auto kvals = [&](const Vector& taus) {
    Points t = taus;
    return Vector(gram(k, t, Points::Zero(1, 1)).col(0));
  };
  const double k0 = kvals(Vector::Zero(1))[0];
  // Find T with |k(tau)| negligible on [T, 2T].
  double horizon = 1.0;
  for (int i = 0;; ++i) {
    if (i > 60) throw UnsupportedError("kernel does not decay; it has no spectral density");
    const Vector probe = Vector::LinSpaced(65, horizon, 2.0 * horizon);
    if (kvals(probe).cwiseAbs().maxCoeff() <= 1e-16 * std::abs(k0)) break;
    horizon *= 2.0;
  }
  const double wmax = frequencies.size() > 0 ? frequencies.cwiseAbs().maxCoeff() : 0.0;
  const auto n = static_cast<Eigen::Index>(std::max(20000.0, std::ceil(40.0 * horizon * wmax)) + 1);
  const Vector taus = Vector::LinSpaced(n, 0.0, horizon);
  const double dt = horizon / static_cast<double>(n - 1);
  Vector weights = kvals(taus) * dt;
  weights[0] *= 0.5;
  weights[n - 1] *= 0.5;
  Vector out(frequencies.size());
  for (Eigen::Index g = 0; g < frequencies.size(); ++g) {
    out[g] = 4.0 * (weights.array() * (2.0 * kPi * frequencies[g] * taus.array()).cos()).sum();
  }
  return out.cwiseMax(0.0);
}

Vector kernel_density_values(const Kernel& k, const Vector& frequencies) {
  require_spectral_ready(k);
  return density_impl(k, frequencies).cwiseMax(0.0);
}

SpectralGrid density_of_kernel(const Kernel& k, const Vector& frequencies) {
  SpectralGrid grid{frequencies, kernel_density_values(k, frequencies)};
  grid.validate();
  return grid;
}

Kernel kernel_from_density(const SpectralGrid& grid) {
  return Kernel::spectral(std::make_shared<const SpectralGrid>(grid));
}

Vector default_grid(const Kernel& k0, int grid_size, const GridOptions& options) {
  require_spectral_ready(k0);
  if (grid_size < 2) throw ValidationError("spectral grid needs G >= 2");
  if (options.max_frequency) {
    if (!(*options.max_frequency > 0.0)) throw ConfigError("max frequency must be positive");
    return Vector::LinSpaced(grid_size, 0.0, *options.max_frequency);
  }
  auto density_at = [&](double w) { return kernel_density_values(k0, Vector::Constant(1, w))[0]; };
  double peak = density_at(0.0);
  if (!(peak > 0.0)) throw ConfigError("reference spectral density vanishes at frequency 0");
  auto below = [&](double w) {
    const double v = density_at(w);
    peak = std::max(peak, v);
    return v <= options.tail_threshold * peak;
  };
  double lo = 0.0;
  double hi = 1e-6;
  while (!below(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > options.search_cap) {
      throw ConfigError("spectral density does not fall below the tail threshold; set max_frequency manually");
    }
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (below(mid) ? hi : lo) = mid;
  }
  return Vector::LinSpaced(grid_size, 0.0, hi);
}

double spectral_functional(const FittedGp& gp_template, const FunctionalSpec& spec, const SpectralGrid& grid) {
  return evaluate_functional(gp_template.with_kernel(kernel_from_density(grid)), spec);
}

Vector functional_gradient(const FittedGp& gp_template, const FunctionalSpec& spec, const SpectralGrid& grid,
                           double* value) {
  if (gp_template.data().dim() != 1) throw UnsupportedError("spectral perturbation supports 1-D inputs only");
  const FittedGp gp = gp_template.with_kernel(kernel_from_density(grid));
  const PosteriorAdjoint adj = functional_adjoint(gp, spec, value);
  const CosineBasis basis(grid.frequencies);
  const Vector& x = gp.data().x.col(0);
  const Eigen::Index n = x.size();
  Vector acc = Vector::Zero(grid.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    basis.accumulate(0.0, adj.d_gram(i, i), acc);
    for (Eigen::Index j = i + 1; j < n; ++j) basis.accumulate(x[i] - x[j], 2.0 * adj.d_gram(i, j), acc);
    basis.accumulate(spec.x_star[0] - x[i], adj.d_cross[i], acc);
  }
  basis.accumulate(0.0, adj.d_prior_variance, acc);
  return acc.cwiseProduct(grid.trapezoid_weights());
}

SpectralSearchResult maximize_spectral(const FittedGp& gp0, const FunctionalSpec& spec, const SpectralBox& box,
                                       const SpectralSearchOptions& options) {
  box.validate();
  spec.validate();
  if (options.restarts < 1) throw ValidationError("spectral search needs at least one restart");
  if (!(options.step_size > 0.0)) throw ValidationError("step size must be positive");
  if (options.direction != 1.0 && options.direction != -1.0) throw ValidationError("direction must be +1 or -1");
  const Vector lo = box.lower();
  const Vector hi = box.upper();
  const Vector width = hi - lo;
  const double dir = options.direction;

  SpectralGrid work = box.reference;
  auto evaluate = [&](const Vector& s) {
    work.density = s;
    try {
      return spectral_functional(gp0, spec, work);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  struct Start {
    Vector density;
    std::string origin;
  };
  std::vector<Start> starts{{box.reference.density, "reference"}};
  for (const Vector& w : options.warm_starts) {
    if (w.size() != lo.size()) throw InputError("warm start has the wrong number of frequencies");
    starts.push_back({box.clip(w), "warm"});
  }
  for (int r = 1; r < options.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint64_t>(options.seed), static_cast<std::uint64_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector s(lo.size());
    for (Eigen::Index g = 0; g < s.size(); ++g) s[g] = lo[g] + unif(rng) * width[g];
    starts.push_back({s, "random"});
  }

  SpectralSearchResult result;
  double best_oriented = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < starts.size(); ++r) {
    SpectralRestart diag;
    diag.index = static_cast<int>(r);
    diag.origin = starts[r].origin;
    Vector s = starts[r].density;
    double f = evaluate(s);
    diag.start_value = f;
    if (!std::isfinite(f)) {
      diag.value = f;
      diag.status = "aborted: non-finite F* at the start";
      result.restarts.push_back(diag);
      continue;
    }
    diag.status = "step limit";
    int step = 0;
    for (; step < options.steps; ++step) {
      work.density = s;
      Vector grad;
      try {
        grad = dir * functional_gradient(gp0, spec, work);
      } catch (const NumericalError& e) {
        diag.status = std::string("aborted: ") + e.what();
        break;
      }
      if (!grad.allFinite()) {
        diag.status = "aborted: non-finite gradient";
        break;
      }
      Vector direction = grad;
      if (options.step_rule == AscentStep::BoxScaled) {
        const Vector scaled = width.cwiseProduct(grad);
        const double norm = scaled.cwiseAbs().maxCoeff();
        direction = norm > 0.0 ? Vector(width.cwiseProduct(scaled) / norm) : Vector::Zero(grad.size());
      }
      if (!(direction.cwiseAbs().maxCoeff() > 0.0)) {
        diag.status = "converged";
        break;
      }
      bool accepted = false;
      bool stuck = false;
      double eta = options.step_size;
      for (int h = 0; h <= options.max_halvings; ++h, eta *= 0.5) {
        const Vector cand = (s + eta * direction).cwiseMax(lo).cwiseMin(hi);
        if (cand == s) {
          stuck = true;
          break;
        }
        const double fc = evaluate(cand);
        if (std::isfinite(fc) && dir * fc >= dir * f) {
          s = cand;
          f = fc;
          accepted = true;
          break;
        }
      }
      if (!accepted || stuck) {
        diag.status = "converged";
        break;
      }
    }
    diag.steps = step;
    diag.value = f;
    if (dir * f > best_oriented) {
      best_oriented = dir * f;
      result.best = box.reference;
      result.best.density = s;
      result.value = f;
      result.best_restart = static_cast<int>(r);
    }
    result.restarts.push_back(diag);
  }
  if (!std::isfinite(best_oriented)) throw OptimizationError("every spectral restart aborted");
  return result;
}

}  // namespace gpsens
