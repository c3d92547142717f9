#pragma once

#include <cstdint>
#include <vector>

#include "gpsens/types.hpp"

namespace gpsens {

// Small fully connected network h: R^D -> R^D with ReLU hidden layers and a linear output.
// The input warp is g(x) = x + h(x).
class WarpNet {
 public:
  struct Layer {
    Matrix weight;  // out x in
    Vector bias;    // out
  };

  WarpNet() = default;
  explicit WarpNet(std::vector<Layer> layers);

  static WarpNet zeros(int dim, const std::vector<int>& hidden);
  // Weights ~ N(0, init_scale^2 / fan_in), biases zero.
  static WarpNet random(int dim, const std::vector<int>& hidden, double init_scale,
                        std::uint64_t seed);

  int dim() const;
  std::vector<int> hidden_sizes() const;
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t num_parameters() const;
  // Layer by layer: weight (row-major) then bias.
  Vector parameters() const;
  void set_parameters(const Vector& params);

  // h(x) for each row of x.
  Points offsets(const Points& x) const;
  // g(x) = x + h(x) for each row of x.
  Points warp(const Points& x) const;
  Vector warp(const Vector& x) const;

  // Returns sum_i (dh(x_i)/dw)^T upstream_i. The ReLU subgradient is 0 at a zero pre-activation.
  Vector backprop(const Points& x, const Points& upstream) const;

 private:
  void check_input(const Points& x) const;

  std::vector<Layer> layers_;
};

}  // namespace gpsens
