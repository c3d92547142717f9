#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "gpsens/data.hpp"
#include "gpsens/error.hpp"
#include "gpsens/json_io.hpp"
#include "gpsens/mmle.hpp"
#include "gpsens/workflow.hpp"

using namespace gpsens;
using namespace testing;

namespace {

FittedGp synthetic_fit() {
  FitOptions o;
  o.restarts = 2;
  return fit_mmle(generate_synthetic(0), parse_kernel("se(1!, 1)"), o).gp;
}

WorkflowOptions small_spectral(const FittedGp& gp, double x_star, std::vector<double> schedule) {
  WorkflowOptions o;
  o.engine = EngineKind::Spectral;
  o.functional = FunctionalSpec::relative_change(gp, scalar(x_star));
  o.delta = 2.0;
  o.schedule = std::move(schedule);
  o.spectral.grid_size = 40;
  o.spectral.search.steps = 40;
  o.spectral.search.restarts = 2;
  o.diagnostics.samples = 40;
  o.diagnostics.draw_points = 30;
  o.seed = 3;
  return o;
}

}  // namespace

TEST_CASE("verdict mapping") {
  CHECK(assemble_verdict(true, true) == kVerdictNonRobust);
  CHECK(assemble_verdict(true, false) == kVerdictFailed);
  CHECK(assemble_verdict(false, true) == kVerdictNotChanged);
  CHECK(assemble_verdict(false, false) == kVerdictFailed);
}

TEST_CASE("precondition and option errors") {
  FittedGp gp = synthetic_fit();
  WorkflowOptions o = small_spectral(gp, 5.29, {0.2});
  o.delta = -1.0;
  CHECK_THROWS_AS(run_workflow(gp, o), PreconditionError);
  o.delta = 2.0;
  o.schedule = {0.3, 0.2};
  CHECK_THROWS_AS(run_workflow(gp, o), ValidationError);
  o.schedule = {-0.1};
  CHECK_THROWS_AS(run_workflow(gp, o), ValidationError);
  o.schedule = {};
  CHECK_THROWS_AS(run_workflow(gp, o), ValidationError);
}

TEST_CASE("spectral workflow report") {
  FittedGp gp = synthetic_fit();
  WorkflowOptions o = small_spectral(gp, 5.29, {0.2, 0.4, 0.6, 0.8});
  SensitivityReport r = run_workflow(gp, o);
  REQUIRE_FALSE(r.schedule.empty());
  CHECK(r.baseline_value == 0.0);
  for (std::size_t i = 1; i < r.schedule.size(); ++i) CHECK(r.schedule[i].value >= r.schedule[i - 1].value - 1e-6);
  for (std::size_t i = 0; i + 1 < r.schedule.size(); ++i) CHECK_FALSE(r.schedule[i].crossed);
  CHECK(r.crossed == r.schedule.back().crossed);
  CHECK(r.k1_epsilon == r.schedule.back().epsilon);
  CHECK(r.verdict == assemble_verdict(r.crossed, r.comparison.interchangeable));
  CHECK(r.comparison.samples.size() == 40);
  CHECK(r.draws.labels == std::vector<std::string>{"k0", "k1"});

  // k1 reproduces its value from the serialized form
  Kernel k1 = kernel_from_json(parse_json(dump_json(kernel_to_json(r.k1))));
  CHECK(std::abs(evaluate_functional(gp.with_kernel(k1), o.functional) - r.k1_value) <= 1e-10);

  Json j = report_to_json(r, gp.kernel());
  CHECK(reassemble_verdict(parse_json(dump_json(j))) == r.verdict);

  SensitivityReport again = run_workflow(gp, o);
  CHECK(dump_json(report_to_json(again, gp.kernel())) == dump_json(j));
}

TEST_CASE("direction below flips the search") {
  FittedGp gp = synthetic_fit();
  WorkflowOptions o = small_spectral(gp, 5.29, {0.2, 0.4});
  o.direction = -1.0;
  o.delta = -2.0;
  SensitivityReport r = run_workflow(gp, o);
  for (const auto& e : r.schedule) CHECK(e.value <= 1e-12);
  o.delta = 1.0;
  CHECK_THROWS_AS(run_workflow(gp, o), PreconditionError);
}

TEST_CASE("warp workflow") {
  FittedGp gp = synthetic_fit();
  WorkflowOptions o;
  o.engine = EngineKind::Warp;
  o.functional = FunctionalSpec::posterior_mean(scalar(5.29));
  o.delta = evaluate_functional(gp, o.functional) + 0.5;
  o.crossing_tolerance = 0.01 * std::abs(o.delta);
  o.schedule = {0.1, 1.0, 10.0};
  o.warp.flags = flags_whole_kernel();
  o.warp.search.hidden = {10};
  o.warp.search.steps = 40;
  o.warp.search.restarts = 2;
  o.diagnostics.samples = 20;
  o.diagnostics.draw_points = 20;
  SensitivityReport r = run_workflow(gp, o);
  CHECK(r.k1.contains(KernelKind::Warped));
  for (const auto& e : r.schedule) CHECK(e.warp_restarts.size() == 3 - (&e == &r.schedule.front() ? 1 : 0));
  Kernel k1 = kernel_from_json(parse_json(dump_json(kernel_to_json(r.k1))));
  CHECK(std::abs(evaluate_functional(gp.with_kernel(k1), o.functional) - r.k1_value) <= 1e-10);
  CHECK(reassemble_verdict(report_to_json(r, gp.kernel())) == r.verdict);
}

TEST_CASE("multi-dimensional comparison points") {
  std::mt19937_64 rng(1);
  Dataset d = random_dataset(rng, 6, 2);
  FittedGp gp(d, Kernel::squared_exponential(1, 1), 0.1);
  Points p = comparison_points(gp, vec({9.0, 9.0}), 200);
  CHECK(p.rows() == 7);
  CHECK(p(6, 0) == 9.0);
}
