#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "helpers.hpp"

#include "gpsens/error.hpp"
#include "gpsens/json_io.hpp"
#include "gpsens/spectral.hpp"
#include "gpsens/warp.hpp"

using namespace gpsens;
using namespace testing;

TEST_CASE("numbers keep full precision") {
  Json j;
  j["x"] = 0.1;
  j["n"] = std::numeric_limits<double>::quiet_NaN();
  j["i"] = 3;
  std::string s = dump_json(j);
  CHECK(s.find("0.10000000000000001") != std::string::npos);
  CHECK(s.find("null") != std::string::npos);
  CHECK(parse_json(s)["x"].get<double>() == 0.1);
  CHECK_THROWS_AS(parse_json("{bad"), InputError);
}

TEST_CASE("matrices and vectors") {
  std::mt19937_64 rng(1);
  Matrix m = uniform_points(rng, 3, 2, -1, 1);
  CHECK(matrix_from_json(parse_json(dump_json(matrix_to_json(m)))) == m);
  Vector v = normal_vector(rng, 4);
  CHECK(vector_from_json(parse_json(dump_json(vector_to_json(v)))) == v);
}

TEST_CASE("kernel serialization") {
  std::mt19937_64 rng(2);
  Points x = uniform_points(rng, 6, 1, 0.0, 4.0);
  Kernel plain = parse_kernel("se(1.5, 0.3!) * periodic(1!, 0.9, 1!) + rq(0.2, 1.1, 0.4)");
  Kernel p2 = kernel_from_json(parse_json(dump_json(kernel_to_json(plain))));
  CHECK(gram(p2, x) == gram(plain, x));
  CHECK(p2.node(2).is_fixed(1));
  CHECK(kernel_from_json(Json("se(2, 3)")).param(0) == 2.0);

  auto net = std::make_shared<WarpNet>(WarpNet::random(1, {4, 3}, 1.0, 5));
  Kernel warped = warped_kernel(plain, net, flags_except_periodic(plain));
  Json wj = kernel_to_json(warped);
  CHECK(wj["warps"].size() == 1);
  Kernel w2 = kernel_from_json(parse_json(dump_json(wj)));
  CHECK(gram(w2, x) == gram(warped, x));

  Kernel se = Kernel::squared_exponential(1.0, 0.8);
  Kernel spectral = kernel_from_density(density_of_kernel(se, default_grid(se, 25)));
  Kernel s2 = kernel_from_json(parse_json(dump_json(kernel_to_json(spectral))));
  CHECK(gram(s2, x) == gram(spectral, x));
}

TEST_CASE("warp net serialization") {
  WarpNet net = WarpNet::random(2, {3}, 0.7, 9);
  WarpNet back = warp_net_from_json(parse_json(dump_json(warp_net_to_json(net))));
  CHECK(back.parameters() == net.parameters());
  CHECK(back.hidden_sizes() == net.hidden_sizes());
}

TEST_CASE("functional serialization") {
  FunctionalSpec f = FunctionalSpec::posterior_quantile(vec({1.0, 2.0}), 0.9, true);
  FunctionalSpec b = functional_from_json(functional_to_json(f));
  CHECK(b.kind == f.kind);
  CHECK(b.q == 0.9);
  CHECK(b.include_noise);
  CHECK(b.x_star == f.x_star);
}
