#pragma once

#include "gpsens/types.hpp"

namespace gpsens {

// Discretized one-sided spectral density: k(tau) = integral_0^inf cos(2 pi tau w) S(w) dw,
// approximated with the trapezoidal rule on `frequencies`.
struct SpectralGrid {
  Vector frequencies;  // cycles per input unit, strictly increasing, first entry 0
  Vector density;      // nonnegative

  Eigen::Index size() const { return frequencies.size(); }

  // Throws ValidationError unless G >= 2, frequencies start at 0 and increase strictly,
  // and every density value is finite and >= 0.
  void validate() const;

  // Trapezoid weights w_g so that the rule reads sum_g w_g f(w_g).
  Vector trapezoid_weights() const;

  bool is_uniform() const;
};

// Trapezoidal reconstruction of the kernel at lag tau.
double spectral_kernel_value(const SpectralGrid& grid, double tau);

// Evaluates sum_g coeff_g cos(2 pi tau freq_g) for every g-weighted combination at once.
// `uniform` enables the Chebyshev recurrence (one cosine per lag). Used by the Gram
// builders and by the density gradient so both share the exact same arithmetic.
class CosineBasis {
 public:
  explicit CosineBasis(const Vector& frequencies);

  // sum_g coeff_g cos(2 pi tau freq_g)
  double combine(const Vector& coeff, double tau) const;
  // sum_g coeff_g 2 pi freq_g sin(2 pi tau freq_g)
  double combine_sine_derivative(const Vector& coeff, double tau) const;
  // out_g += weight * cos(2 pi tau freq_g)
  void accumulate(double tau, double weight, Vector& out) const;

 private:
  Vector frequencies_;
  bool uniform_ = false;
  double step_ = 0.0;
};

}  // namespace gpsens
