#include "gpsens/warp_net.hpp"

#include <cmath>
#include <random>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

std::vector<int> layer_dims(int dim, const std::vector<int>& hidden) {
  if (dim < 1) throw ValidationError("warp network dimension must be >= 1");
  std::vector<int> dims{dim};
  for (int h : hidden) {
    if (h < 1) throw ValidationError("hidden layer sizes must be >= 1");
    dims.push_back(h);
  }
  dims.push_back(dim);
  return dims;
}

}  // namespace

WarpNet::WarpNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ValidationError("warp network needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.bias.size() != layer.weight.rows()) throw ValidationError("warp layer bias size mismatch");
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows()) {
      throw ValidationError("warp layer shapes do not chain");
    }
  }
  if (layers_.front().weight.cols() != layers_.back().weight.rows()) {
    throw ValidationError("warp network input and output dimensions must match");
  }
}

WarpNet WarpNet::zeros(int dim, const std::vector<int>& hidden) {
  const auto dims = layer_dims(dim, hidden);
  std::vector<Layer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    layers.push_back({Matrix::Zero(dims[l + 1], dims[l]), Vector::Zero(dims[l + 1])});
  }
  return WarpNet(std::move(layers));
}

WarpNet WarpNet::random(int dim, const std::vector<int>& hidden, double init_scale, std::uint64_t seed) {
  if (!(init_scale >= 0.0)) throw ValidationError("warp init scale must be >= 0");
  WarpNet net = zeros(dim, hidden);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Layer& layer : net.layers_) {
    const double sd = init_scale / std::sqrt(static_cast<double>(layer.weight.cols()));
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = sd * normal(rng);
    }
  }
  return net;
}

int WarpNet::dim() const { return layers_.empty() ? 0 : static_cast<int>(layers_.front().weight.cols()); }

std::vector<int> WarpNet::hidden_sizes() const {
  std::vector<int> out;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) out.push_back(static_cast<int>(layers_[l].weight.rows()));
  return out;
}

std::size_t WarpNet::num_parameters() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) n += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
  return n;
}

Vector WarpNet::parameters() const {
  Vector out(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index at = 0;
  for (const Layer& layer : layers_) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) out[at++] = layer.weight(i, j);
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) out[at++] = layer.bias[i];
  }
  return out;
}

void WarpNet::set_parameters(const Vector& params) {
  if (static_cast<std::size_t>(params.size()) != num_parameters()) {
    throw InputError("warp network expects " + std::to_string(num_parameters()) + " parameters, got " +
                     std::to_string(params.size()));
  }
  Eigen::Index at = 0;
  for (Layer& layer : layers_) {
    for (Eigen::Index i = 0; i < layer.weight.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = params[at++];
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = params[at++];
  }
}

void WarpNet::check_input(const Points& x) const {
  if (x.cols() != dim()) {
    throw InputError("warp network expects " + std::to_string(dim()) + "-D inputs, got " +
                     std::to_string(x.cols()));
  }
}

Points WarpNet::offsets(const Points& x) const {
  check_input(x);
  Matrix a = x.transpose();
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    Matrix z = layers_[l].weight * a;
    z.colwise() += layers_[l].bias;
    a = (l + 1 < layers_.size()) ? Matrix(z.cwiseMax(0.0)) : z;
  }
  return a.transpose();
}

Points WarpNet::warp(const Points& x) const { return x + offsets(x); }

Vector WarpNet::warp(const Vector& x) const {
  Points row = x.transpose();
  return warp(row).transpose();
}

Vector WarpNet::backprop(const Points& x, const Points& upstream) const {
  check_input(x);
  if (upstream.rows() != x.rows() || upstream.cols() != x.cols()) {
    throw InputError("warp backprop: upstream shape mismatch");
  }
  const std::size_t n_layers = layers_.size();
  std::vector<Matrix> acts{x.transpose()};  // input of each layer
  std::vector<Matrix> pre;
  for (std::size_t l = 0; l < n_layers; ++l) {
    Matrix z = layers_[l].weight * acts.back();
    z.colwise() += layers_[l].bias;
    pre.push_back(z);
    if (l + 1 < n_layers) acts.push_back(z.cwiseMax(0.0));
  }

  std::vector<Matrix> grad_w(n_layers);
  std::vector<Vector> grad_b(n_layers);
  Matrix delta = upstream.transpose();
  for (std::size_t l = n_layers; l-- > 0;) {
    grad_w[l] = delta * acts[l].transpose();
    grad_b[l] = delta.rowwise().sum();
    if (l > 0) {
      delta = (layers_[l].weight.transpose() * delta).array() * (pre[l - 1].array() > 0.0).cast<double>();
    }
  }

  Vector out(static_cast<Eigen::Index>(num_parameters()));
  Eigen::Index at = 0;
  for (std::size_t l = 0; l < n_layers; ++l) {
    for (Eigen::Index i = 0; i < grad_w[l].rows(); ++i) {
      for (Eigen::Index j = 0; j < grad_w[l].cols(); ++j) out[at++] = grad_w[l](i, j);
    }
    for (Eigen::Index i = 0; i < grad_b[l].size(); ++i) out[at++] = grad_b[l][i];
  }
  return out;
}

}  // namespace gpsens
