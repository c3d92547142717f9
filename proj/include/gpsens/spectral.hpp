#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpsens/functional.hpp"
#include "gpsens/gp.hpp"
#include "gpsens/kernel.hpp"
#include "gpsens/spectral_grid.hpp"

namespace gpsens {

// Box around a reference density: max(0, (1 - eps) S0) <= S <= (1 + eps) S0, per frequency.
struct SpectralBox {
  SpectralGrid reference;
  double epsilon = 0.0;

  void validate() const;
  Vector lower() const;
  Vector upper() const;
  Vector clip(const Vector& density) const;
  bool contains(const Vector& density) const;
};

// One-sided density (S~ = 2 S, so k(tau) = integral_0^inf cos(2 pi tau w) S~(w) dw) of a
// stationary 1-D kernel at the given frequencies. SE and Matern 5/2 nodes (and sums of them)
// use closed forms; anything else goes through a trapezoidal cosine transform of k(tau).
Vector kernel_density_values(const Kernel& k, const Vector& frequencies);
SpectralGrid density_of_kernel(const Kernel& k, const Vector& frequencies);

// Numeric one-sided cosine transform, 4 * integral_0^T k(tau) cos(2 pi tau w) dtau.
Vector numeric_density_values(const Kernel& k, const Vector& frequencies);

Kernel kernel_from_density(const SpectralGrid& grid);

struct GridOptions {
  // omega_G is the smallest frequency with S0(omega) <= tail_threshold * max S0.
  double tail_threshold = 1e-15;
  // Overrides the tail rule with a fixed upper frequency.
  std::optional<double> max_frequency;
  double search_cap = 1e12;
};

// Uniform grid from 0 to omega_G with G points.
Vector default_grid(const Kernel& k0, int grid_size, const GridOptions& options = {});

// F* under the trapezoidal kernel of `grid`, using the template's data, noise and mean.
double spectral_functional(const FittedGp& gp_template, const FunctionalSpec& spec, const SpectralGrid& grid);

// dF*/dS_g, exact: every Gram entry is linear in the density values.
Vector functional_gradient(const FittedGp& gp_template, const FunctionalSpec& spec, const SpectralGrid& grid,
                           double* value = nullptr);

enum class AscentStep {
  // S + eta * grad F*, then clipped
  Gradient,
  // per-coordinate move of eta * width_g * (width_g grad_g) / max_h |width_h grad_h|
  BoxScaled,
};

struct SpectralSearchOptions {
  int steps = 500;
  AscentStep step_rule = AscentStep::Gradient;
  double step_size = 0.1;
  int max_halvings = 20;
  // Restart 0 starts at S0; the others start uniformly at random inside the box.
  int restarts = 1;
  std::uint64_t seed = 0;
  // Extra starting densities (clipped into the box), run after restart 0.
  std::vector<Vector> warm_starts;
  // +1 maximizes F*, -1 maximizes -F*.
  double direction = 1.0;
};

struct SpectralRestart {
  int index = 0;
  std::string origin;  // "reference", "warm", "random"
  double start_value = 0.0;
  double value = 0.0;  // F* (unoriented) at the best iterate
  int steps = 0;
  std::string status;  // "converged", "step limit", "aborted: ..."
};

struct SpectralSearchResult {
  SpectralGrid best;
  double value = 0.0;  // F* at `best`
  int best_restart = 0;
  std::vector<SpectralRestart> restarts;
};

// Projected gradient ascent of direction * F* over the box. Steps move along the gradient
// scaled by the box widths, are clipped into the box, and are halved until the objective does
// not decrease. Kernel hyperparameters, noise and the functional stay frozen at gp0.
SpectralSearchResult maximize_spectral(const FittedGp& gp0, const FunctionalSpec& spec, const SpectralBox& box,
                                       const SpectralSearchOptions& options = {});

}  // namespace gpsens
