#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gpsens/gp.hpp"
#include "gpsens/kernel.hpp"
#include "gpsens/laplace.hpp"

namespace gpsens {

using NormalSource = std::function<double()>;
NormalSource seeded_normal_source(std::uint64_t seed);

struct NoiseMatchedDraws {
  Points points;                    // P x D
  Matrix z;                         // P x n_draws, shared by every kernel
  std::vector<std::string> labels;  // one per kernel
  std::vector<Matrix> draws;        // L_k z for each kernel
  Vector band;                      // 3 sqrt(diag) of the first kernel's covariance
};

// z is filled draw by draw, point by point within a draw.
NoiseMatchedDraws noise_matched_draws(const std::vector<Kernel>& kernels, const std::vector<std::string>& labels,
                                      const Points& points, int n_draws, std::uint64_t seed);
NoiseMatchedDraws noise_matched_draws(const std::vector<Matrix>& covariances, const std::vector<std::string>& labels,
                                      const Points& points, int n_draws, const NormalSource& normal);

// 200 uniform points over [min X, max(x*, max X)] merged with the training inputs (1-D).
Points draw_grid(const Points& x, const Vector& x_star, int count = 200);

// |A - B|_F / |B|_F
double relative_frobenius(const Matrix& a, const Matrix& b);

struct VerdictRule {
  enum class Kind { Max, Quantile };
  Kind kind = Kind::Max;
  double q = 0.95;

  static VerdictRule max() { return {}; }
  static VerdictRule quantile(double q) { return {Kind::Quantile, q}; }
  std::string name() const;
};

// Linear interpolation between order statistics (the usual type-7 sample quantile).
double empirical_quantile(std::vector<double> values, double q);

struct FrobeniusComparison {
  double reference_norm = 0.0;
  double candidate = 0.0;
  std::vector<double> samples;  // in sample order
  VerdictRule rule;
  double threshold = 0.0;
  bool interchangeable = true;
};

// Applies the rule: "not interchangeable" iff candidate > threshold.
FrobeniusComparison compare_to_samples(double reference_norm, double candidate, std::vector<double> samples,
                                       const VerdictRule& rule);

// Candidate statistic of k1 against k0 on the training inputs, and R statistics of kernels
// with k0's form and hyperparameters drawn from the Laplace posterior.
FrobeniusComparison frobenius_histogram(const FittedGp& gp0, const Kernel& k1, const HyperPosterior& hp, int samples,
                                        std::uint64_t seed, const VerdictRule& rule = {});

struct PlotRow {
  double point;
  long index;
  double value;
  std::string series;

  bool operator==(const PlotRow&) const = default;
};
using PlotData = std::vector<PlotRow>;

// Columns point,index,value,series; numbers with 17 significant digits.
std::string emit_plot_csv(const PlotData& rows);
PlotData parse_plot_csv(const std::string& text);

// One series per kernel label (index = draw), plus "band_lower"/"band_upper" (index 0).
PlotData draw_report(const NoiseMatchedDraws& draws);
// "laplace_sample" rows (index = sample) and one "candidate" row, all with point 0.
PlotData histogram_report(const FrobeniusComparison& comparison);

}  // namespace gpsens
