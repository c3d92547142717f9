#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gpsens/spectral_grid.hpp"
#include "gpsens/types.hpp"
#include "gpsens/warp_net.hpp"

namespace gpsens {

enum class KernelKind {
  SquaredExponential,  // h^2 exp(-r^2 / (2 l^2))
  Matern52,            // h^2 (1 + sqrt5 r/l + 5 r^2/(3 l^2)) exp(-sqrt5 r/l)
  Periodic,            // h^2 exp(-2 sum_d sin^2(pi d_d / p) / l^2)
  RationalQuadratic,   // h^2 (1 + r^2 / (2 alpha l^2))^-alpha
  Sum,
  Product,
  Warped,    // child evaluated at (g(x), g(x'))
  Spectral,  // trapezoidal cosine transform of a discretized density (1-D only)
};

std::string_view kind_name(KernelKind kind);

struct HyperParameter {
  std::string name;  // "<preorder index>.<kind>.<role>", e.g. "2.se.lengthscale"
  double value;
  bool fixed;
};

// Kernel expression tree. Value type: copies are deep except for the spectral grid and warp
// network, which are shared immutable objects.
class Kernel {
 public:
  static Kernel squared_exponential(double amplitude, double lengthscale);
  static Kernel matern52(double amplitude, double lengthscale);
  static Kernel periodic(double amplitude, double lengthscale, double period);
  static Kernel rational_quadratic(double amplitude, double lengthscale, double alpha);
  static Kernel sum(std::vector<Kernel> terms);
  static Kernel product(std::vector<Kernel> factors);
  static Kernel warped(Kernel child, std::shared_ptr<const WarpNet> net);
  static Kernel spectral(std::shared_ptr<const SpectralGrid> grid);

  KernelKind kind() const { return kind_; }
  bool is_leaf() const { return children_.empty() && kind_ != KernelKind::Warped; }
  const std::vector<Kernel>& children() const { return children_; }
  const std::vector<double>& params() const { return params_; }
  double param(std::size_t i) const { return params_.at(i); }
  bool is_fixed(std::size_t i) const { return fixed_.at(i); }
  std::vector<std::string> param_roles() const;

  // Holds a hyperparameter of this node at its current value during fitting.
  Kernel& fix(std::size_t param_index, bool fixed = true);

  const SpectralGrid& grid() const;
  const std::shared_ptr<const WarpNet>& warp_net() const { return net_; }

  // Preorder node access; node 0 is the root.
  std::size_t node_count() const;
  const Kernel& node(std::size_t preorder_index) const;
  // Returns a copy where node `preorder_index` is replaced by `replacement`.
  Kernel with_node(std::size_t preorder_index, Kernel replacement) const;

  bool contains(KernelKind kind) const;
  // Stationary in the raw inputs: no Warped node anywhere.
  bool is_stationary() const { return !contains(KernelKind::Warped); }

  std::vector<HyperParameter> hyperparameters() const;
  std::size_t num_free_params() const;
  // Free (non-fixed) hyperparameters in preorder, log-transformed.
  Vector free_log_params() const;
  Kernel with_free_log_params(const Vector& log_params) const;

  // Throws ValidationError on non-positive/non-finite hyperparameters or empty Sum/Product.
  void validate() const;

  double operator()(const Vector& x, const Vector& x2) const;

  // Expression-language rendering (see parse_kernel). Spectral and Warped nodes have no
  // textual form and render as placeholders; use the JSON serialization for those.
  std::string to_string() const;

 private:
  Kernel() = default;
  Kernel(KernelKind kind, std::vector<double> params);

  KernelKind kind_ = KernelKind::SquaredExponential;
  std::vector<double> params_;
  std::vector<bool> fixed_;
  std::vector<Kernel> children_;
  std::shared_ptr<const SpectralGrid> grid_;
  std::shared_ptr<const WarpNet> net_;
};

double eval_kernel(const Kernel& k, const Vector& x, const Vector& x2);

// Symmetric Gram matrix k(X, X); the upper triangle is mirrored so symmetry is exact.
Matrix gram(const Kernel& k, const Points& x);
Matrix gram(const Kernel& k, const Points& x, const Points& x2);

struct GramWithGradients {
  Matrix value;
  // d value / d log(theta_p) for every free hyperparameter, preorder.
  std::vector<Matrix> d_log_params;
};
GramWithGradients gram_with_param_gradients(const Kernel& k, const Points& x);

// Gram matrix where every Warped node reads the supplied pre-warped inputs instead of
// running its network, together with the derivative of each entry with respect to the
// warped left input: left_grad[d](i, j) = dK_ij / du_i[d]. All leaves are stationary, so
// the derivative with respect to the right input is the negative of this.
struct RoutedGram {
  Matrix value;
  std::vector<Matrix> left_grad;
};
RoutedGram routed_gram(const Kernel& k, const Points& x, const Points& warped_x,
                       const Points& x2, const Points& warped_x2, bool symmetric);

// Expression grammar:
//   expr   := term ('+' term)*
//   term   := factor ('*' factor)*
//   factor := name '(' number['!'] (',' number['!'])* ')' | '(' expr ')'
//   name   := se | matern52 | periodic | rq
// Argument order is (amplitude, lengthscale[, period | alpha]); a trailing '!' holds the
// value fixed during fitting. Named presets: "se", "heartrate", "maunaloa".
Kernel parse_kernel(std::string_view text);

}  // namespace gpsens
