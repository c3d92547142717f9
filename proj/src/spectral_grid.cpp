#include <cmath>
#include <numbers>

#include "gpsens/error.hpp"
#include "gpsens/spectral_grid.hpp"

namespace gpsens {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

void SpectralGrid::validate() const {
  if (frequencies.size() < 2) throw ValidationError("spectral grid needs at least two frequencies");
  if (density.size() != frequencies.size()) {
    throw ValidationError("spectral grid: density and frequency counts differ");
  }
  if (frequencies[0] != 0.0) throw ValidationError("spectral grid must start at frequency 0");
  for (Eigen::Index g = 1; g < frequencies.size(); ++g) {
    if (!(frequencies[g] > frequencies[g - 1]) || !std::isfinite(frequencies[g])) {
      throw ValidationError("spectral grid frequencies must increase strictly");
    }
  }
  for (Eigen::Index g = 0; g < density.size(); ++g) {
    if (!(density[g] >= 0.0) || !std::isfinite(density[g])) {
      throw ValidationError("spectral density values must be finite and nonnegative");
    }
  }
}

Vector SpectralGrid::trapezoid_weights() const {
  const Eigen::Index n = frequencies.size();
  Vector w = Vector::Zero(n);
  for (Eigen::Index g = 0; g + 1 < n; ++g) {
    const double half = 0.5 * (frequencies[g + 1] - frequencies[g]);
    w[g] += half;
    w[g + 1] += half;
  }
  return w;
}

bool SpectralGrid::is_uniform() const {
  const Eigen::Index n = frequencies.size();
  if (n < 2) return false;
  const double step = (frequencies[n - 1] - frequencies[0]) / static_cast<double>(n - 1);
  for (Eigen::Index g = 1; g < n; ++g) {
    if (std::abs(frequencies[g] - frequencies[0] - step * static_cast<double>(g)) > 1e-12 * frequencies[n - 1]) {
      return false;
    }
  }
  return true;
}

double spectral_kernel_value(const SpectralGrid& grid, double tau) {
  CosineBasis basis(grid.frequencies);
  return basis.combine(grid.trapezoid_weights().cwiseProduct(grid.density), tau);
}

CosineBasis::CosineBasis(const Vector& frequencies) : frequencies_(frequencies) {
  SpectralGrid probe{frequencies, Vector::Zero(frequencies.size())};
  uniform_ = frequencies.size() >= 2 && frequencies[0] == 0.0 && probe.is_uniform();
  if (uniform_) step_ = frequencies[frequencies.size() - 1] / static_cast<double>(frequencies.size() - 1);
}

double CosineBasis::combine(const Vector& coeff, double tau) const {
  const Eigen::Index n = frequencies_.size();
  if (!uniform_) {
    double acc = 0.0;
    for (Eigen::Index g = 0; g < n; ++g) acc += coeff[g] * std::cos(kTwoPi * tau * frequencies_[g]);
    return acc;
  }
  // cos((g+1)t) = 2 cos(t) cos(g t) - cos((g-1)t)
  const double c1 = std::cos(kTwoPi * tau * step_);
  double prev = 1.0;
  double cur = c1;
  double acc = coeff[0] + coeff[1] * c1;
  for (Eigen::Index g = 2; g < n; ++g) {
    const double next = 2.0 * c1 * cur - prev;
    acc += coeff[g] * next;
    prev = cur;
    cur = next;
  }
  return acc;
}

double CosineBasis::combine_sine_derivative(const Vector& coeff, double tau) const {
  const Eigen::Index n = frequencies_.size();
  double acc = 0.0;
  if (!uniform_) {
    for (Eigen::Index g = 0; g < n; ++g) {
      acc += coeff[g] * kTwoPi * frequencies_[g] * std::sin(kTwoPi * tau * frequencies_[g]);
    }
    return acc;
  }
  // sin((g+1)t) = 2 cos(t) sin(g t) - sin((g-1)t)
  const double t = kTwoPi * tau * step_;
  const double c1 = std::cos(t);
  double prev = 0.0;
  double cur = std::sin(t);
  acc = coeff[1] * kTwoPi * step_ * cur;
  for (Eigen::Index g = 2; g < n; ++g) {
    const double next = 2.0 * c1 * cur - prev;
    acc += coeff[g] * kTwoPi * step_ * static_cast<double>(g) * next;
    prev = cur;
    cur = next;
  }
  return acc;
}

void CosineBasis::accumulate(double tau, double weight, Vector& out) const {
  const Eigen::Index n = frequencies_.size();
  if (!uniform_) {
    for (Eigen::Index g = 0; g < n; ++g) out[g] += weight * std::cos(kTwoPi * tau * frequencies_[g]);
    return;
  }
  const double c1 = std::cos(kTwoPi * tau * step_);
  double prev = 1.0;
  double cur = c1;
  out[0] += weight;
  out[1] += weight * c1;
  for (Eigen::Index g = 2; g < n; ++g) {
    const double next = 2.0 * c1 * cur - prev;
    out[g] += weight * next;
    prev = cur;
    cur = next;
  }
}

}  // namespace gpsens
