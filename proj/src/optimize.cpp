#include "gpsens/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gpsens/error.hpp"

namespace gpsens {

MinimizeResult minimize_bfgs(const DifferentiableObjective& f, Vector x, const MinimizeOptions& options) {
  const Eigen::Index n = x.size();
  MinimizeResult out;
  Vector g(n);
  double fx = f(x, &g);
  if (!std::isfinite(fx) || !g.allFinite()) throw NumericalError("BFGS: non-finite objective at the start");
  out.trace.push_back(fx);
  Matrix h = Matrix::Identity(n, n);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.norm() < options.gradient_tolerance) {
      out.converged = true;
      out.message = "gradient tolerance reached";
      break;
    }
    Vector dir = -h * g;
    if (dir.dot(g) >= 0.0) {
      h.setIdentity();
      dir = -g;
    }
    // Keep the first trial step bounded in log-parameter space.
    const double dn = dir.norm();
    double step = dn > 5.0 ? 5.0 / dn : 1.0;
    const double slope = dir.dot(g);
    Vector x_new(n);
    Vector g_new(n);
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      x_new = x + step * dir;
      try {
        f_new = f(x_new, &g_new);
      } catch (const NumericalError&) {
        f_new = std::numeric_limits<double>::infinity();
      }
      if (std::isfinite(f_new) && g_new.allFinite() && f_new <= fx + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.message = "line search failed";
      break;
    }
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    const double rel_change = std::abs(fx - f_new) / std::max(1.0, std::abs(fx));
    x = x_new;
    g = g_new;
    fx = f_new;
    out.trace.push_back(fx);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Matrix eye = Matrix::Identity(n, n);
      h = (eye - rho * s * y.transpose()) * h * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    if (rel_change < options.value_tolerance) {
      out.converged = g.norm() < 1e3 * options.gradient_tolerance;
      out.message = "objective stalled";
      ++it;
      break;
    }
  }
  if (out.message.empty()) out.message = "iteration limit";
  out.x = x;
  out.value = fx;
  out.gradient_norm = g.norm();
  out.iterations = it;
  return out;
}

MinimizeResult minimize_nelder_mead(const std::function<double(const Vector&)>& f, Vector x0, double step,
                                    const MinimizeOptions& options) {
  const Eigen::Index n = x0.size();
  auto safe = [&](const Vector& x) {
    try {
      const double v = f(x);
      return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::vector<Vector> simplex{x0};
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector v = x0;
    v[i] += step;
    simplex.push_back(v);
  }
  std::vector<double> values;
  for (const Vector& v : simplex) values.push_back(safe(v));
  if (!std::isfinite(values[0])) throw NumericalError("Nelder-Mead: non-finite objective at the start");

  MinimizeResult out;
  std::vector<std::size_t> order(simplex.size());
  int it = 0;
  for (; it < options.max_iterations * static_cast<int>(std::max<Eigen::Index>(n, 1)); ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });
    out.trace.push_back(values[order[0]]);
    const double best = values[order[0]];
    const double worst = values[order.back()];
    if (std::abs(worst - best) <= options.value_tolerance * std::max(1.0, std::abs(best))) {
      out.converged = true;
      break;
    }
    Vector centroid = Vector::Zero(n);
    for (std::size_t k = 0; k + 1 < order.size(); ++k) centroid += simplex[order[k]];
    centroid /= static_cast<double>(n);
    const std::size_t w = order.back();
    const Vector reflected = centroid + (centroid - simplex[w]);
    const double fr = safe(reflected);
    if (fr < best) {
      const Vector expanded = centroid + 2.0 * (centroid - simplex[w]);
      const double fe = safe(expanded);
      if (fe < fr) {
        simplex[w] = expanded;
        values[w] = fe;
      } else {
        simplex[w] = reflected;
        values[w] = fr;
      }
      continue;
    }
    if (fr < values[order[order.size() - 2]]) {
      simplex[w] = reflected;
      values[w] = fr;
      continue;
    }
    const Vector contracted = centroid + 0.5 * (simplex[w] - centroid);
    const double fc = safe(contracted);
    if (fc < values[w]) {
      simplex[w] = contracted;
      values[w] = fc;
      continue;
    }
    const Vector& xb = simplex[order[0]];
    for (std::size_t k = 1; k < order.size(); ++k) {
      simplex[order[k]] = xb + 0.5 * (simplex[order[k]] - xb);
      values[order[k]] = safe(simplex[order[k]]);
    }
  }
  const auto best = std::min_element(values.begin(), values.end()) - values.begin();
  out.x = simplex[static_cast<std::size_t>(best)];
  out.value = values[static_cast<std::size_t>(best)];
  out.gradient_norm = std::numeric_limits<double>::quiet_NaN();
  out.iterations = it;
  out.message = out.converged ? "simplex collapsed" : "iteration limit";
  return out;
}

}  // namespace gpsens
