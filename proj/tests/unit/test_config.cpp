#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "gpsens/config.hpp"
#include "gpsens/error.hpp"
#include "gpsens/json_io.hpp"
#include "gpsens/run.hpp"

using namespace gpsens;
using namespace testing;

namespace {

const char* kSmall = R"json({
  "data": {"source": "synthetic", "seed": 2},
  "kernel": "se(1!, 1)",
  "fit": {"restarts": 2},
  "functional": {"kind": "relative-change", "x_star": [5.29]},
  "delta": 2,
  "engine": {
    "type": "spectral",
    "schedule": {"spacing": "linear", "from": 0.2, "to": 0.8, "count": 3},
    "spectral": {"grid_size": 30, "steps": 20, "restarts": 2}
  },
  "diagnostics": {"samples": 30, "draw_points": 25},
  "seed": 4
})json";

RunConfig small() { return config_from_json(parse_json(kSmall)); }

Json patched(const std::string& pointer, const Json& value) {
  Json j = parse_json(kSmall);
  j[Json::json_pointer(pointer)] = value;
  return j;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  RunConfig c = small();
  CHECK(c.delta.value == 2.0);
  CHECK(c.engine.schedule.epsilons().size() == 3);
  CHECK(c.engine.schedule.epsilons()[1] == doctest::Approx(0.5));
  CHECK(c.engine.spectral.tail_threshold == 1e-15);
  CHECK(c.engine.spectral.max_frequency == std::nullopt);
  CHECK(c.diagnostics.rule == "max");
  CHECK(c.diagnostics.samples == 30);
  CHECK(c.fit.initial_noise_variance == 0.1);
  CHECK(c.direction == "above");
}

TEST_CASE("schedules") {
  ScheduleConfig s;
  s.spacing = "log10";
  s.from = 0.1;
  s.to = 1.0;
  s.count = 15;
  auto e = s.epsilons();
  CHECK(e.size() == 15);
  CHECK(e.front() == doctest::Approx(std::pow(10.0, 0.1)));
  CHECK(e.back() == doctest::Approx(10.0));
  RunConfig c = config_from_json(patched("/engine/schedule", Json::array({0.1, 0.3})));
  CHECK(c.engine.schedule.epsilons() == std::vector<double>{0.1, 0.3});
}

TEST_CASE("config echo round trips") {
  RunConfig c = small();
  Json echo = config_to_json(c);
  RunConfig back = config_from_json(parse_json(dump_json(echo)));
  CHECK(dump_json(config_to_json(back)) == dump_json(echo));
}

TEST_CASE("strict config errors") {
  CHECK_THROWS_AS(config_from_json(patched("/engine/spectral/stepz", 3)), ConfigError);
  try {
    config_from_json(patched("/fit/bogus", 1));
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(config_from_json(patched("/engine/schedule", Json::array({-0.2, 0.3}))), ConfigError);
  CHECK_THROWS_AS(config_from_json(patched("/engine/schedule", Json::array({0.3, 0.2}))), ConfigError);
  CHECK_THROWS_AS(config_from_json(patched("/direction", "sideways")), ConfigError);
  CHECK_THROWS_AS(config_from_json(patched("/fit/restarts", 0)), ConfigError);
  CHECK_THROWS_AS(config_from_json(patched("/fit/restarts", "five")), ConfigError);
  Json no_delta = parse_json(kSmall);
  no_delta.erase("delta");
  CHECK_THROWS_AS(config_from_json(no_delta), ConfigError);
}

TEST_CASE("end to end run") {
  RunConfig c = small();
  RunOutputs out = run_from_config(c);
  CHECK(out.report["schema"] == kReportSchema);
  CHECK(out.report["verdict"] == out.verdict);
  CHECK(out.exit_code == exit_code_for_verdict(out.verdict));
  CHECK(config_from_json(out.report["config"]).seed == c.seed);
  CHECK(reassemble_verdict(out.report) == out.verdict);
  RunOutputs again = run_from_config(c);
  CHECK(dump_json(again.report) == dump_json(out.report));

  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "gpsens_unit_run";
  fs::remove_all(dir);
  write_outputs(out, dir.string(), true);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "draws.csv"));
  CHECK(fs::exists(dir / "histogram.csv"));
  CHECK(fs::exists(dir / "draws.svg"));
  CHECK(parse_plot_csv(read_text_file((dir / "draws.csv").string())) == out.draws);
  fs::remove_all(dir);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for_verdict(kVerdictNonRobust) == 10);
  CHECK(exit_code_for_verdict(kVerdictFailed) == 0);
  CHECK(exit_code_for_verdict(kVerdictNotChanged) == 0);
}

TEST_CASE("delta from an observation") {
  RunConfig c = small();
  c.functional.kind = "posterior-mean";
  c.delta.value.reset();
  c.delta.observed_at = 4.0;
  c.delta.units = "raw";
  c.preprocess = "standardize";
  PreparedData d = prepare_data(c);
  double delta = delta_from_config(c, d);
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < d.raw.size(); ++i)
    if (std::abs(d.raw.x(i, 0) - 4.0) < std::abs(d.raw.x(best, 0) - 4.0)) best = i;
  CHECK(delta == doctest::Approx(d.transform.apply(d.raw.y(best))).epsilon(1e-14));
}
