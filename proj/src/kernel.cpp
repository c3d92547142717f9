#include "gpsens/kernel.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

constexpr double kPi = std::numbers::pi;
const double kSqrt5 = std::sqrt(5.0);

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Everything a leaf needs that does not depend on the pair: the spectral basis and its
// trapezoid-weighted coefficients.
struct LeafContext {
  const Kernel& k;
  std::unique_ptr<CosineBasis> basis;
  Vector coeff;

  explicit LeafContext(const Kernel& kernel, Eigen::Index dim) : k(kernel) {
    if (k.kind() == KernelKind::Spectral) {
      if (dim != 1) {
        throw UnsupportedError("spectral kernels support 1-D inputs only");
      }
      const SpectralGrid& g = k.grid();
      basis = std::make_unique<CosineBasis>(g.frequencies);
      coeff = g.trapezoid_weights().cwiseProduct(g.density);
    }
  }

  double value(const Eigen::RowVectorXd& d) const {
    const auto& p = k.params();
    switch (k.kind()) {
      case KernelKind::SquaredExponential: {
        const double r2 = d.squaredNorm();
        return p[0] * p[0] * std::exp(-0.5 * r2 / (p[1] * p[1]));
      }
      case KernelKind::Matern52: {
        const double s = kSqrt5 * d.norm() / p[1];
        return p[0] * p[0] * (1.0 + s + s * s / 3.0) * std::exp(-s);
      }
      case KernelKind::Periodic: {
        double acc = 0.0;
        for (Eigen::Index c = 0; c < d.size(); ++c) {
          const double sn = std::sin(kPi * d[c] / p[2]);
          acc += sn * sn;
        }
        return p[0] * p[0] * std::exp(-2.0 * acc / (p[1] * p[1]));
      }
      case KernelKind::RationalQuadratic: {
        const double base = 1.0 + d.squaredNorm() / (2.0 * p[2] * p[1] * p[1]);
        return p[0] * p[0] * std::pow(base, -p[2]);
      }
      case KernelKind::Spectral:
        return basis->combine(coeff, d[0]);
      default:
        throw Error("leaf evaluation on a composite node");
    }
  }

  // dk/du for d = u - v, written into `out`.
  void left_grad(const Eigen::RowVectorXd& d, double value, Eigen::Ref<Eigen::RowVectorXd> out) const {
    const auto& p = k.params();
    switch (k.kind()) {
      case KernelKind::SquaredExponential:
        out = -value / (p[1] * p[1]) * d;
        return;
      case KernelKind::Matern52: {
        const double s = kSqrt5 * d.norm() / p[1];
        out = -p[0] * p[0] * (5.0 / (3.0 * p[1] * p[1])) * (1.0 + s) * std::exp(-s) * d;
        return;
      }
      case KernelKind::Periodic:
        for (Eigen::Index c = 0; c < d.size(); ++c) {
          out[c] = -value * (2.0 * kPi / (p[1] * p[1] * p[2])) * std::sin(2.0 * kPi * d[c] / p[2]);
        }
        return;
      case KernelKind::RationalQuadratic: {
        const double base = 1.0 + d.squaredNorm() / (2.0 * p[2] * p[1] * p[1]);
        out = -p[0] * p[0] * std::pow(base, -p[2] - 1.0) / (p[1] * p[1]) * d;
        return;
      }
      case KernelKind::Spectral:
        out[0] = -basis->combine_sine_derivative(coeff, d[0]);
        return;
      default:
        throw Error("leaf gradient on a composite node");
    }
  }

  // dk/dlog(theta) for every hyperparameter of the leaf.
  void param_grads(const Eigen::RowVectorXd& d, double value, double* out) const {
    const auto& p = k.params();
    switch (k.kind()) {
      case KernelKind::SquaredExponential:
        out[0] = 2.0 * value;
        out[1] = value * d.squaredNorm() / (p[1] * p[1]);
        return;
      case KernelKind::Matern52: {
        const double s = kSqrt5 * d.norm() / p[1];
        out[0] = 2.0 * value;
        out[1] = p[0] * p[0] * s * s * (1.0 + s) / 3.0 * std::exp(-s);
        return;
      }
      case KernelKind::Periodic: {
        double sin2 = 0.0;
        double dsin = 0.0;
        for (Eigen::Index c = 0; c < d.size(); ++c) {
          const double sn = std::sin(kPi * d[c] / p[2]);
          sin2 += sn * sn;
          dsin += d[c] * std::sin(2.0 * kPi * d[c] / p[2]);
        }
        out[0] = 2.0 * value;
        out[1] = value * 4.0 * sin2 / (p[1] * p[1]);
        out[2] = value * (2.0 * kPi / (p[1] * p[1] * p[2])) * dsin;
        return;
      }
      case KernelKind::RationalQuadratic: {
        const double r2 = d.squaredNorm();
        const double base = 1.0 + r2 / (2.0 * p[2] * p[1] * p[1]);
        out[0] = 2.0 * value;
        out[1] = p[0] * p[0] * std::pow(base, -p[2] - 1.0) * r2 / (p[1] * p[1]);
        out[2] = value * p[2] * (-std::log(base) + (base - 1.0) / base);
        return;
      }
      default:
        return;
    }
  }
};

void check_dims(const Points& a, const Points& b) {
  if (a.cols() != b.cols()) {
    throw InputError("kernel input dimension mismatch: " + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()));
  }
}

Matrix leaf_gram(const Kernel& k, const Points& a, const Points& b, bool sym) {
  LeafContext ctx(k, a.cols());
  Matrix out(a.rows(), b.rows());
  Eigen::RowVectorXd d(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = sym ? i : 0; j < b.rows(); ++j) {
      d.noalias() = a.row(i) - b.row(j);
      out(i, j) = ctx.value(d);
      if (sym) out(j, i) = out(i, j);
    }
  }
  return out;
}

Matrix gram_impl(const Kernel& k, const Points& a, const Points& b, bool sym) {
  switch (k.kind()) {
    case KernelKind::Sum: {
      Matrix out = gram_impl(k.children()[0], a, b, sym);
      for (std::size_t c = 1; c < k.children().size(); ++c) out += gram_impl(k.children()[c], a, b, sym);
      return out;
    }
    case KernelKind::Product: {
      Matrix out = gram_impl(k.children()[0], a, b, sym);
      for (std::size_t c = 1; c < k.children().size(); ++c) {
        out.array() *= gram_impl(k.children()[c], a, b, sym).array();
      }
      return out;
    }
    case KernelKind::Warped: {
      const Points wa = k.warp_net()->warp(a);
      if (sym) return gram_impl(k.children()[0], wa, wa, true);
      return gram_impl(k.children()[0], wa, k.warp_net()->warp(b), false);
    }
    default:
      return leaf_gram(k, a, b, sym);
  }
}

void param_grads_impl(const Kernel& k, const Points& a, Matrix& value, std::vector<Matrix>& grads) {
  switch (k.kind()) {
    case KernelKind::Sum: {
      value = Matrix::Zero(a.rows(), a.rows());
      for (const Kernel& c : k.children()) {
        Matrix v;
        param_grads_impl(c, a, v, grads);
        value += v;
      }
      return;
    }
    case KernelKind::Product: {
      const std::size_t n = k.children().size();
      std::vector<Matrix> values(n);
      std::vector<std::vector<Matrix>> child_grads(n);
      for (std::size_t c = 0; c < n; ++c) param_grads_impl(k.children()[c], a, values[c], child_grads[c]);
      value = values[0];
      for (std::size_t c = 1; c < n; ++c) value.array() *= values[c].array();
      for (std::size_t c = 0; c < n; ++c) {
        for (Matrix& g : child_grads[c]) {
          for (std::size_t o = 0; o < n; ++o) {
            if (o != c) g.array() *= values[o].array();
          }
          grads.push_back(std::move(g));
        }
      }
      return;
    }
    case KernelKind::Warped:
      param_grads_impl(k.children()[0], k.warp_net()->warp(a), value, grads);
      return;
    default: {
      LeafContext ctx(k, a.cols());
      const std::size_t np = k.params().size();
      std::vector<Matrix> local(np, Matrix(a.rows(), a.rows()));
      value.resize(a.rows(), a.rows());
      Eigen::RowVectorXd d(a.cols());
      double buf[3] = {0.0, 0.0, 0.0};
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i; j < a.rows(); ++j) {
          d.noalias() = a.row(i) - a.row(j);
          const double v = ctx.value(d);
          value(i, j) = value(j, i) = v;
          ctx.param_grads(d, v, buf);
          for (std::size_t p = 0; p < np; ++p) local[p](i, j) = local[p](j, i) = buf[p];
        }
      }
      for (std::size_t p = 0; p < np; ++p) {
        if (!k.is_fixed(p)) grads.push_back(std::move(local[p]));
      }
      return;
    }
  }
}

struct RoutedPart {
  Matrix value;
  std::vector<Matrix> grad;  // empty: identically zero
};

RoutedPart routed_impl(const Kernel& k, const Points& xa, const Points& ua, const Points& xb,
                       const Points& ub, bool sym, bool warped, const WarpNet*& net) {
  const Eigen::Index dim = xa.cols();
  switch (k.kind()) {
    case KernelKind::Sum:
    case KernelKind::Product: {
      const bool is_sum = k.kind() == KernelKind::Sum;
      RoutedPart acc = routed_impl(k.children()[0], xa, ua, xb, ub, sym, warped, net);
      for (std::size_t c = 1; c < k.children().size(); ++c) {
        RoutedPart part = routed_impl(k.children()[c], xa, ua, xb, ub, sym, warped, net);
        if (is_sum) {
          acc.value += part.value;
          if (acc.grad.empty()) {
            acc.grad = std::move(part.grad);
          } else if (!part.grad.empty()) {
            for (Eigen::Index d = 0; d < dim; ++d) acc.grad[d] += part.grad[d];
          }
        } else {
          std::vector<Matrix> grad;
          if (!acc.grad.empty() || !part.grad.empty()) {
            grad.assign(dim, Matrix::Zero(acc.value.rows(), acc.value.cols()));
            for (Eigen::Index d = 0; d < dim; ++d) {
              if (!acc.grad.empty()) grad[d].array() += acc.grad[d].array() * part.value.array();
              if (!part.grad.empty()) grad[d].array() += acc.value.array() * part.grad[d].array();
            }
          }
          acc.value.array() *= part.value.array();
          acc.grad = std::move(grad);
        }
      }
      return acc;
    }
    case KernelKind::Warped: {
      if (warped) throw UnsupportedError("nested warped nodes are not supported");
      if (net != nullptr && net != k.warp_net().get()) {
        throw UnsupportedError("all warped nodes must share one warp network");
      }
      net = k.warp_net().get();
      return routed_impl(k.children()[0], xa, ua, xb, ub, sym, true, net);
    }
    default: {
      const Points& a = warped ? ua : xa;
      const Points& b = warped ? ub : xb;
      LeafContext ctx(k, dim);
      RoutedPart out;
      out.value.resize(a.rows(), b.rows());
      if (warped) out.grad.assign(dim, Matrix(a.rows(), b.rows()));
      Eigen::RowVectorXd d(dim);
      Eigen::RowVectorXd g(dim);
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = sym ? i : 0; j < b.rows(); ++j) {
          d.noalias() = a.row(i) - b.row(j);
          const double v = ctx.value(d);
          out.value(i, j) = v;
          if (sym) out.value(j, i) = v;
          if (warped) {
            ctx.left_grad(d, v, g);
            for (Eigen::Index c = 0; c < dim; ++c) {
              out.grad[c](i, j) = g[c];
              if (sym) out.grad[c](j, i) = -g[c];
            }
          }
        }
      }
      return out;
    }
  }
}

// ---------------------------------------------------------------------------------------
// Expression parser

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Kernel parse() {
    Kernel k = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return k;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("kernel expression: " + what + " at offset " + std::to_string(pos_) +
                     " in \"" + std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  Kernel expr() {
    std::vector<Kernel> terms{term()};
    while (accept('+')) terms.push_back(term());
    return terms.size() == 1 ? std::move(terms[0]) : Kernel::sum(std::move(terms));
  }

  Kernel term() {
    std::vector<Kernel> factors{factor()};
    while (accept('*')) factors.push_back(factor());
    return factors.size() == 1 ? std::move(factors[0]) : Kernel::product(std::move(factors));
  }

  Kernel factor() {
    if (accept('(')) {
      Kernel k = expr();
      expect(')');
      return k;
    }
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    if (name.empty()) fail("expected a kernel name");
    expect('(');
    std::vector<double> args;
    std::vector<bool> fixed;
    do {
      skip_ws();
      const std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("expected a number");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      args.push_back(v);
      fixed.push_back(accept('!'));
    } while (accept(','));
    expect(')');

    auto arity = [&](std::size_t n) {
      if (args.size() != n) fail(name + " takes " + std::to_string(n) + " arguments");
    };
    Kernel k = [&] {
      if (name == "se") {
        arity(2);
        return Kernel::squared_exponential(args[0], args[1]);
      }
      if (name == "matern52") {
        arity(2);
        return Kernel::matern52(args[0], args[1]);
      }
      if (name == "periodic") {
        arity(3);
        return Kernel::periodic(args[0], args[1], args[2]);
      }
      if (name == "rq") {
        arity(3);
        return Kernel::rational_quadratic(args[0], args[1], args[2]);
      }
      fail("unknown kernel '" + name + "'");
    }();
    for (std::size_t i = 0; i < fixed.size(); ++i) k.fix(i, fixed[i]);
    return k;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string_view kind_name(KernelKind kind) {
  switch (kind) {
    case KernelKind::SquaredExponential: return "se";
    case KernelKind::Matern52: return "matern52";
    case KernelKind::Periodic: return "periodic";
    case KernelKind::RationalQuadratic: return "rq";
    case KernelKind::Sum: return "sum";
    case KernelKind::Product: return "product";
    case KernelKind::Warped: return "warped";
    case KernelKind::Spectral: return "spectral";
  }
  return "?";
}

Kernel::Kernel(KernelKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)), fixed_(params_.size(), false) {
  validate();
}

Kernel Kernel::squared_exponential(double amplitude, double lengthscale) {
  return Kernel(KernelKind::SquaredExponential, {amplitude, lengthscale});
}

Kernel Kernel::matern52(double amplitude, double lengthscale) {
  return Kernel(KernelKind::Matern52, {amplitude, lengthscale});
}

Kernel Kernel::periodic(double amplitude, double lengthscale, double period) {
  return Kernel(KernelKind::Periodic, {amplitude, lengthscale, period});
}

Kernel Kernel::rational_quadratic(double amplitude, double lengthscale, double alpha) {
  return Kernel(KernelKind::RationalQuadratic, {amplitude, lengthscale, alpha});
}

Kernel Kernel::sum(std::vector<Kernel> terms) {
  Kernel k;
  k.kind_ = KernelKind::Sum;
  k.children_ = std::move(terms);
  k.validate();
  return k;
}

Kernel Kernel::product(std::vector<Kernel> factors) {
  Kernel k;
  k.kind_ = KernelKind::Product;
  k.children_ = std::move(factors);
  k.validate();
  return k;
}

Kernel Kernel::warped(Kernel child, std::shared_ptr<const WarpNet> net) {
  if (!net) throw ValidationError("warped kernel needs a warp network");
  Kernel k;
  k.kind_ = KernelKind::Warped;
  k.children_.push_back(std::move(child));
  k.net_ = std::move(net);
  return k;
}

Kernel Kernel::spectral(std::shared_ptr<const SpectralGrid> grid) {
  if (!grid) throw ValidationError("spectral kernel needs a grid");
  grid->validate();
  Kernel k;
  k.kind_ = KernelKind::Spectral;
  k.grid_ = std::move(grid);
  return k;
}

std::vector<std::string> Kernel::param_roles() const {
  switch (kind_) {
    case KernelKind::SquaredExponential:
    case KernelKind::Matern52:
      return {"amplitude", "lengthscale"};
    case KernelKind::Periodic:
      return {"amplitude", "lengthscale", "period"};
    case KernelKind::RationalQuadratic:
      return {"amplitude", "lengthscale", "alpha"};
    default:
      return {};
  }
}

Kernel& Kernel::fix(std::size_t param_index, bool fixed) {
  fixed_.at(param_index) = fixed;
  return *this;
}

const SpectralGrid& Kernel::grid() const {
  if (!grid_) throw Error("not a spectral node");
  return *grid_;
}

std::size_t Kernel::node_count() const {
  std::size_t n = 1;
  for (const Kernel& c : children_) n += c.node_count();
  return n;
}

const Kernel& Kernel::node(std::size_t index) const {
  if (index == 0) return *this;
  --index;
  for (const Kernel& c : children_) {
    const std::size_t n = c.node_count();
    if (index < n) return c.node(index);
    index -= n;
  }
  throw InputError("kernel node index out of range");
}

Kernel Kernel::with_node(std::size_t index, Kernel replacement) const {
  if (index == 0) return replacement;
  Kernel out = *this;
  --index;
  for (Kernel& c : out.children_) {
    const std::size_t n = c.node_count();
    if (index < n) {
      c = c.with_node(index, std::move(replacement));
      return out;
    }
    index -= n;
  }
  throw InputError("kernel node index out of range");
}

bool Kernel::contains(KernelKind kind) const {
  if (kind_ == kind) return true;
  for (const Kernel& c : children_) {
    if (c.contains(kind)) return true;
  }
  return false;
}

std::vector<HyperParameter> Kernel::hyperparameters() const {
  std::vector<HyperParameter> out;
  std::size_t index = 0;
  auto visit = [&](const Kernel& k, auto&& self) -> void {
    const std::size_t me = index++;
    const auto roles = k.param_roles();
    for (std::size_t p = 0; p < k.params_.size(); ++p) {
      out.push_back({std::to_string(me) + "." + std::string(kind_name(k.kind_)) + "." + roles[p],
                     k.params_[p], k.fixed_[p]});
    }
    for (const Kernel& c : k.children_) self(c, self);
  };
  visit(*this, visit);
  return out;
}

std::size_t Kernel::num_free_params() const {
  std::size_t n = 0;
  for (bool f : fixed_) n += f ? 0 : 1;
  for (const Kernel& c : children_) n += c.num_free_params();
  return n;
}

Vector Kernel::free_log_params() const {
  std::vector<double> out;
  auto visit = [&](const Kernel& k, auto&& self) -> void {
    for (std::size_t p = 0; p < k.params_.size(); ++p) {
      if (!k.fixed_[p]) out.push_back(std::log(k.params_[p]));
    }
    for (const Kernel& c : k.children_) self(c, self);
  };
  visit(*this, visit);
  return Eigen::Map<Vector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Kernel Kernel::with_free_log_params(const Vector& log_params) const {
  if (static_cast<std::size_t>(log_params.size()) != num_free_params()) {
    throw InputError("expected " + std::to_string(num_free_params()) + " free log-parameters, got " +
                     std::to_string(log_params.size()));
  }
  Kernel out = *this;
  Eigen::Index next = 0;
  auto visit = [&](Kernel& k, auto&& self) -> void {
    for (std::size_t p = 0; p < k.params_.size(); ++p) {
      if (!k.fixed_[p]) k.params_[p] = std::exp(log_params[next++]);
    }
    for (Kernel& c : k.children_) self(c, self);
  };
  visit(out, visit);
  out.validate();
  return out;
}

void Kernel::validate() const {
  for (std::size_t p = 0; p < params_.size(); ++p) {
    if (!(params_[p] > 0.0) || !std::isfinite(params_[p])) {
      throw ValidationError(std::string(kind_name(kind_)) + " " + param_roles()[p] +
                            " must be positive and finite, got " + format_number(params_[p]));
    }
  }
  if ((kind_ == KernelKind::Sum || kind_ == KernelKind::Product) && children_.empty()) {
    throw ValidationError(std::string(kind_name(kind_)) + " kernel needs at least one child");
  }
  for (const Kernel& c : children_) c.validate();
}

double Kernel::operator()(const Vector& x, const Vector& x2) const { return eval_kernel(*this, x, x2); }

std::string Kernel::to_string() const {
  std::ostringstream os;
  switch (kind_) {
    case KernelKind::Sum:
      for (std::size_t c = 0; c < children_.size(); ++c) os << (c ? " + " : "") << children_[c].to_string();
      break;
    case KernelKind::Product:
      for (std::size_t c = 0; c < children_.size(); ++c) {
        const bool paren = children_[c].kind_ == KernelKind::Sum;
        os << (c ? " * " : "") << (paren ? "(" : "") << children_[c].to_string() << (paren ? ")" : "");
      }
      break;
    case KernelKind::Warped:
      os << "warped(" << children_[0].to_string() << ")";
      break;
    case KernelKind::Spectral:
      os << "spectral(G=" << grid_->size() << ")";
      break;
    default:
      os << kind_name(kind_) << "(";
      for (std::size_t p = 0; p < params_.size(); ++p) {
        os << (p ? ", " : "") << format_number(params_[p]) << (fixed_[p] ? "!" : "");
      }
      os << ")";
  }
  return os.str();
}

double eval_kernel(const Kernel& k, const Vector& x, const Vector& x2) {
  if (x.size() != x2.size()) {
    throw InputError("kernel input dimension mismatch: " + std::to_string(x.size()) + " vs " +
                     std::to_string(x2.size()));
  }
  if (!x.allFinite() || !x2.allFinite()) throw InputError("kernel inputs must be finite");
  return gram_impl(k, x.transpose(), x2.transpose(), false)(0, 0);
}

Matrix gram(const Kernel& k, const Points& x) { return gram_impl(k, x, x, true); }

Matrix gram(const Kernel& k, const Points& x, const Points& x2) {
  check_dims(x, x2);
  return gram_impl(k, x, x2, false);
}

GramWithGradients gram_with_param_gradients(const Kernel& k, const Points& x) {
  GramWithGradients out;
  param_grads_impl(k, x, out.value, out.d_log_params);
  return out;
}

RoutedGram routed_gram(const Kernel& k, const Points& x, const Points& warped_x, const Points& x2,
                       const Points& warped_x2, bool symmetric) {
  check_dims(x, x2);
  check_dims(x, warped_x);
  check_dims(x2, warped_x2);
  const WarpNet* net = nullptr;
  RoutedPart part = routed_impl(k, x, warped_x, x2, warped_x2, symmetric, false, net);
  RoutedGram out;
  out.value = std::move(part.value);
  out.left_grad = std::move(part.grad);
  if (out.left_grad.empty()) out.left_grad.assign(x.cols(), Matrix::Zero(x.rows(), x2.rows()));
  return out;
}

Kernel parse_kernel(std::string_view text) {
  std::string trimmed(text);
  trimmed.erase(0, trimmed.find_first_not_of(" \t\n"));
  trimmed.erase(trimmed.find_last_not_of(" \t\n") + 1);
  if (trimmed == "se") return Kernel::squared_exponential(1.0, 1.0);
  if (trimmed == "heartrate") return Parser("matern52(1, 1) + se(1, 1)").parse();
  if (trimmed == "maunaloa") {
    // trend, seasonal, medium-term irregularities, short-scale noise
    return Parser(
               "se(68.58, 69.09) + se(2.55, 87.60) * periodic(1!, 1.44, 1!) + rq(0.66, 1.18, 0.74) "
               "+ se(0.18, 0.13)")
        .parse();
  }
  return Parser(trimmed).parse();
}

}  // namespace gpsens
