#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gpsens/types.hpp"

namespace gpsens {

struct MinimizeResult {
  Vector x;
  double value = 0.0;
  double gradient_norm = 0.0;  // NaN for gradient-free runs
  int iterations = 0;
  bool converged = false;
  std::string message;
  std::vector<double> trace;  // objective after every accepted iterate, starting point first
};

struct MinimizeOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  double value_tolerance = 1e-12;  // relative
};

// f(x) returns the objective; when `gradient` is non-null it is filled as well.
using DifferentiableObjective = std::function<double(const Vector& x, Vector* gradient)>;

// BFGS with Armijo backtracking. The objective never increases between accepted iterates.
MinimizeResult minimize_bfgs(const DifferentiableObjective& f, Vector x0, const MinimizeOptions& options = {});

// Nelder-Mead simplex; initial simplex spans +step along each coordinate.
MinimizeResult minimize_nelder_mead(const std::function<double(const Vector&)>& f, Vector x0,
                                    double step = 0.5, const MinimizeOptions& options = {});

}  // namespace gpsens
