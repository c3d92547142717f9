#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "gpsens/data.hpp"
#include "gpsens/diagnostics.hpp"
#include "gpsens/error.hpp"
#include "gpsens/spectral.hpp"
#include "gpsens/warp.hpp"

using namespace gpsens;
using namespace testing;

namespace {

Vector uniform_grid(double top, int g) { return Vector::LinSpaced(g, 0.0, top); }

std::shared_ptr<const WarpNet> zero_net() { return std::make_shared<WarpNet>(WarpNet::zeros(1, {3})); }

}  // namespace

TEST_CASE("se density at zero") {
  Vector w = vec({0.0, 0.3, 1.0});
  Vector s = kernel_density_values(Kernel::squared_exponential(1.0, 1.0), w);
  CHECK(s(0) == doctest::Approx(2.0 * std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  CHECK(s(0) == doctest::Approx(5.013256549262001).epsilon(1e-12));
  Vector num = numeric_density_values(Kernel::squared_exponential(1.0, 1.0), w);
  CHECK(max_relative_error(num, s) < 1e-6);
}

TEST_CASE("matern closed form agrees with the numeric transform") {
  Kernel m = Kernel::matern52(1.3, 0.7);
  Vector w = uniform_grid(1.5, 16);
  CHECK(max_relative_error(numeric_density_values(m, w), kernel_density_values(m, w)) < 1e-4);
}

TEST_CASE("density scales with amplitude squared and adds over sums") {
  Vector w = uniform_grid(2.0, 11);
  Vector s1 = kernel_density_values(Kernel::squared_exponential(1.0, 0.6), w);
  Vector s3 = kernel_density_values(Kernel::squared_exponential(3.0, 0.6), w);
  CHECK(max_relative_error(s3, 9.0 * s1) < 1e-14);
  Kernel a = Kernel::squared_exponential(1.0, 0.6), b = Kernel::squared_exponential(0.5, 2.0);
  Vector sum = kernel_density_values(Kernel::sum({a, b}), w);
  CHECK(max_relative_error(sum, kernel_density_values(a, w) + kernel_density_values(b, w)) < 1e-14);
}

TEST_CASE("density rejects warped kernels") {
  Kernel w = Kernel::warped(Kernel::squared_exponential(1.0, 1.0), zero_net());
  CHECK_THROWS_AS(kernel_density_values(w, uniform_grid(1.0, 4)), ValidationError);
}

TEST_CASE("spectral kernel evaluation") {
  SpectralGrid g{uniform_grid(3.0, 7), Vector::Ones(7)};
  Kernel k = kernel_from_density(g);
  CHECK(k(scalar(0.4), scalar(0.4)) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(spectral_kernel_value(g, 0.37) == spectral_kernel_value(g, -0.37));
  // explicit trapezoid sum
  SpectralGrid h{vec({0.0, 0.5, 1.5}), vec({1.0, 2.0, 0.5})};
  auto c = [](double tau, double w) { return std::cos(2 * M_PI * tau * w); };
  double tau = 0.8;
  double hand = 0.25 * (c(tau, 0.0) * 1.0 + c(tau, 0.5) * 2.0) + 0.5 * (c(tau, 0.5) * 2.0 + c(tau, 1.5) * 0.5);
  CHECK(spectral_kernel_value(h, tau) == doctest::Approx(hand).epsilon(1e-14));
  CHECK(kernel_from_density(h)(scalar(0.0), scalar(tau)) == doctest::Approx(hand).epsilon(1e-14));
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((SpectralGrid{vec({0.0}), vec({1.0})}).validate(), ValidationError);
  CHECK_THROWS_AS((SpectralGrid{vec({0.1, 1.0}), vec({1.0, 1.0})}).validate(), ValidationError);
  CHECK_THROWS_AS((SpectralGrid{vec({0.0, 1.0}), vec({1.0, -1.0})}).validate(), ValidationError);
  CHECK_THROWS_AS((SpectralGrid{vec({0.0, 1.0, 0.5}), vec({1.0, 1.0, 1.0})}).validate(), ValidationError);
}

TEST_CASE("round trip on the synthetic inputs") {
  Dataset d = generate_synthetic(0);
  for (double l : {0.5, 0.75, 1.0, 1.5}) {
    Kernel se = Kernel::squared_exponential(1.0, l);
    Vector w = default_grid(se, 100);
    Matrix approx = gram(kernel_from_density(density_of_kernel(se, w)), d.x);
    CHECK(relative_frobenius(approx, gram(se, d.x)) < 1e-3);
  }
}

TEST_CASE("default grid rule") {
  Vector w1 = default_grid(Kernel::squared_exponential(1.0, 0.5), 100);
  Vector w2 = default_grid(Kernel::squared_exponential(1.0, 1.0), 100);
  CHECK(w1(0) == 0.0);
  CHECK(w2(99) / w1(99) == doctest::Approx(0.5).epsilon(0.1));
  // density at the top is at the tail threshold
  Vector s = kernel_density_values(Kernel::squared_exponential(1.0, 1.0), vec({0.0, w2(99)}));
  CHECK(s(1) / s(0) == doctest::Approx(1e-15).epsilon(1e-6));
  Vector two = default_grid(Kernel::squared_exponential(1.0, 1.0), 2);
  CHECK(two.size() == 2);
  CHECK(two(0) == 0.0);
  CHECK(two(1) == doctest::Approx(w2(99)));
  GridOptions fixed;
  fixed.max_frequency = 2.0;
  Vector fixed_grid = default_grid(Kernel::squared_exponential(1.0, 1.0), 100, fixed);
  CHECK(fixed_grid(99) == 2.0);
  CHECK(fixed_grid(1) == doctest::Approx(2.0 / 99.0).epsilon(1e-15));
  CHECK_THROWS_AS(default_grid(Kernel::squared_exponential(1.0, 1.0), 1), ValidationError);
}

TEST_CASE("gradient is exact against finite differences") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 12; ++t) {
    Dataset d = random_dataset(rng, 10, 1, 0.0, 4.0);
    Kernel k0 = Kernel::squared_exponential(1.0, log_uniform(rng, 0.5, 1.5));
    FittedGp gp(d, k0, 0.1);
    GridOptions top;
    top.max_frequency = 0.5 / k0.param(1);
    SpectralGrid g = density_of_kernel(k0, default_grid(k0, 20, top));
    g.density = g.density.array() * (1.0 + 0.3 * normal_vector(rng, 20).array().tanh());
    Vector xs = scalar(std::uniform_real_distribution<double>(0.0, 6.0)(rng));
    FunctionalSpec spec = t % 2 ? FunctionalSpec::posterior_quantile(xs, 0.9, false)
                                : FunctionalSpec::relative_change(gp, xs);
    double value = 0.0;
    Vector grad = functional_gradient(gp, spec, g, &value);
    CHECK(value == doctest::Approx(spectral_functional(gp, spec, g)).epsilon(1e-13));
    Vector fd(20);
    for (int i = 0; i < 20; ++i) {
      double h = 1e-6 * std::max(std::abs(g.density(i)), 1e-3);
      SpectralGrid up = g, dn = g;
      up.density(i) += h;
      dn.density(i) -= h;
      fd(i) = (spectral_functional(gp, spec, up) - spectral_functional(gp, spec, dn)) / (2 * h);
    }
    CHECK(max_relative_error(grad, fd) < 1e-5);
  }
}

TEST_CASE("gradient trivia") {
  std::mt19937_64 rng(32);
  Dataset d = random_dataset(rng, 7);
  Kernel k0 = Kernel::squared_exponential(1.0, 1.0);
  SpectralGrid g = density_of_kernel(k0, default_grid(k0, 15));
  FunctionalSpec spec = FunctionalSpec::posterior_mean(scalar(1.1));
  Dataset zero = d;
  zero.y.setZero();
  CHECK(functional_gradient(FittedGp(zero, k0, 0.1), spec, g).cwiseAbs().maxCoeff() == 0.0);
  Dataset scaled = d;
  scaled.y *= 3.0;
  Vector g1 = functional_gradient(FittedGp(d, k0, 0.1), spec, g);
  Vector g3 = functional_gradient(FittedGp(scaled, k0, 0.1), spec, g);
  CHECK(max_relative_error(g3, 3.0 * g1) < 1e-12);
}

TEST_CASE("box constraints") {
  SpectralBox box{SpectralGrid{vec({0.0, 1.0, 2.0}), vec({2.0, 1.0, 0.5})}, 1.5};
  CHECK(box.lower() == vec({0.0, 0.0, 0.0}));
  CHECK(box.upper() == vec({5.0, 2.5, 1.25}));
  Vector c = box.clip(vec({-1.0, 3.0, 1.0}));
  CHECK(c == vec({0.0, 2.5, 1.0}));
  CHECK(box.clip(c) == c);
  CHECK(box.contains(c));
  box.epsilon = 0.5;
  CHECK(box.lower() == vec({1.0, 0.5, 0.25}));
  box.epsilon = -0.1;
  CHECK_THROWS_AS(box.validate(), ValidationError);
}

TEST_CASE("zero epsilon returns the reference density") {
  Dataset d = generate_synthetic(1);
  Kernel k0 = parse_kernel("se(1!, 0.8)");
  FittedGp gp(d, k0, 0.01);
  SpectralGrid s0 = density_of_kernel(k0, default_grid(k0, 40));
  FunctionalSpec spec = FunctionalSpec::relative_change(gp, scalar(5.29));
  SpectralSearchOptions o;
  o.steps = 20;
  o.restarts = 3;
  SpectralSearchResult r = maximize_spectral(gp, spec, SpectralBox{s0, 0.0}, o);
  CHECK(r.best.density == s0.density);
  CHECK(std::abs(r.value - spectral_functional(gp, spec, s0)) <= 1e-12);
}

TEST_CASE("ascent stays in the box and improves") {
  Dataset d = generate_synthetic(2);
  Kernel k0 = parse_kernel("se(1!, 0.8)");
  FittedGp gp(d, k0, 0.01);
  SpectralGrid s0 = density_of_kernel(k0, default_grid(k0, 40));
  FunctionalSpec spec = FunctionalSpec::relative_change(gp, scalar(5.29));
  SpectralBox box{s0, 0.5};
  for (AscentStep rule : {AscentStep::Gradient, AscentStep::BoxScaled}) {
    SpectralSearchOptions o;
    o.steps = 50;
    o.restarts = 3;
    o.seed = 4;
    o.step_rule = rule;
    SpectralSearchResult r = maximize_spectral(gp, spec, box, o);
    CHECK(box.contains(r.best.density));
    CHECK(r.value >= spectral_functional(gp, spec, s0));
    CHECK(r.restarts.size() == 3);
    CHECK(r.restarts[0].origin == "reference");
    CHECK(r.restarts[1].origin == "random");
    for (const auto& rs : r.restarts) CHECK(rs.value >= rs.start_value);
    SpectralSearchResult again = maximize_spectral(gp, spec, box, o);
    CHECK(again.best.density == r.best.density);
    o.direction = -1.0;
    SpectralSearchResult low = maximize_spectral(gp, spec, box, o);
    CHECK(low.value <= spectral_functional(gp, spec, s0));
  }
}

TEST_CASE("nested boxes with warm starts are monotone") {
  Dataset d = generate_synthetic(3);
  Kernel k0 = parse_kernel("se(1!, 0.8)");
  FittedGp gp(d, k0, 0.01);
  SpectralGrid s0 = density_of_kernel(k0, default_grid(k0, 40));
  FunctionalSpec spec = FunctionalSpec::relative_change(gp, scalar(5.29));
  SpectralSearchOptions o;
  o.steps = 30;
  o.restarts = 2;
  o.seed = 9;
  double previous = -1e300;
  for (double eps : {0.1, 0.2, 0.3, 0.4}) {
    SpectralSearchResult r = maximize_spectral(gp, spec, SpectralBox{s0, eps}, o);
    CHECK(r.value >= previous - 1e-6);
    previous = r.value;
    o.warm_starts = {r.best.density};
  }
}

TEST_CASE("spectral search rejects multi-dimensional inputs") {
  std::mt19937_64 rng(1);
  Dataset d = random_dataset(rng, 5, 2);
  Kernel k0 = Kernel::squared_exponential(1.0, 1.0);
  FittedGp gp(d, k0, 0.1);
  SpectralGrid s0{uniform_grid(1.0, 5), Vector::Ones(5)};
  CHECK_THROWS_AS(functional_gradient(gp, FunctionalSpec::posterior_mean(Vector::Zero(2)), s0), UnsupportedError);
}

TEST_CASE("spectral gram is nearly psd on random points") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 10; ++t) {
    SpectralGrid g{uniform_grid(2.0, 30), (normal_vector(rng, 30).array().abs()).matrix()};
    Matrix k = gram(kernel_from_density(g), uniform_points(rng, 15, 1, 0.0, 5.0));
    CHECK(min_eigenvalue(k) >= -1e-6 * spectral_norm(k));
  }
}
