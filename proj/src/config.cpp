#include "gpsens/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

class Reader {
 public:
  Reader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  const Json& at(const std::string& key) { return j_.at(key); }
  std::string where(const std::string& key = "") const {
    const std::string p = key.empty() ? path_ : path_ + "." + key;
    return p.empty() ? "config" : "config." + p;
  }
  std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void get(const std::string& key, double& out) {
    if (!has(key)) return;
    if (!at(key).is_number()) throw ConfigError(where(key) + " must be a number");
    out = at(key).get<double>();
  }
  void get(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    if (!at(key).is_number()) throw ConfigError(where(key) + " must be a number");
    out = at(key).get<double>();
  }
  void get(const std::string& key, int& out) {
    if (!has(key)) return;
    if (!at(key).is_number_integer()) throw ConfigError(where(key) + " must be an integer");
    out = at(key).get<int>();
  }
  void get(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    if (!at(key).is_number_unsigned()) throw ConfigError(where(key) + " must be a non-negative integer");
    out = at(key).get<std::uint64_t>();
  }
  void get(const std::string& key, bool& out) {
    if (!has(key)) return;
    if (!at(key).is_boolean()) throw ConfigError(where(key) + " must be true or false");
    out = at(key).get<bool>();
  }
  void get(const std::string& key, std::string& out) {
    if (!has(key)) return;
    if (!at(key).is_string()) throw ConfigError(where(key) + " must be a string");
    out = at(key).get<std::string>();
  }
  void get(const std::string& key, std::vector<int>& out) {
    if (!has(key)) return;
    const Json& a = at(key);
    if (!a.is_array()) throw ConfigError(where(key) + " must be an array of integers");
    out.clear();
    for (const Json& e : a) {
      if (!e.is_number_integer()) throw ConfigError(where(key) + " must be an array of integers");
      out.push_back(e.get<int>());
    }
  }
  void get(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const Json& a = at(key);
    if (!a.is_array()) throw ConfigError(where(key) + " must be an array of numbers");
    out.clear();
    for (const Json& e : a) {
      if (!e.is_number()) throw ConfigError(where(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + where(it.key()));
    }
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void one_of(const std::string& value, std::initializer_list<const char*> options, const std::string& where) {
  std::string list;
  for (const char* o : options) {
    if (value == o) return;
    list += std::string(list.empty() ? "" : ", ") + o;
  }
  throw ConfigError(where + " must be one of: " + list + " (got '" + value + "')");
}

}  // namespace

std::vector<double> ScheduleConfig::epsilons() const {
  if (spacing == "list") return values;
  std::vector<double> out;
  for (int i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    const double v = from + t * (to - from);
    out.push_back(spacing == "log10" ? std::pow(10.0, v) : v);
  }
  return out;
}

void RunConfig::validate() const {
  one_of(data.source, {"synthetic", "csv"}, "config.data.source");
  if (data.source == "csv" && data.path.empty()) throw ConfigError("config.data.path is required for csv data");
  parse_preprocess_mode(preprocess);
  one_of(fit.mean, {"zero", "constant", "training-mean"}, "config.fit.mean");
  one_of(fit.optimizer, {"bfgs", "nelder-mead"}, "config.fit.optimizer");
  if (fit.restarts < 1) throw ConfigError("config.fit.restarts must be >= 1");
  if (!(fit.initial_noise_variance > 0.0)) throw ConfigError("config.fit.noise_variance must be > 0");
  if (fit.max_iterations < 1) throw ConfigError("config.fit.max_iterations must be >= 1");
  parse_functional_kind(functional.kind);
  if (functional.x_star.size() == 0) throw ConfigError("config.functional.x_star is required");
  if (!(functional.q > 0.0 && functional.q < 1.0)) throw ConfigError("config.functional.q must lie in (0, 1)");
  if (delta.value.has_value() == delta.observed_at.has_value()) {
    throw ConfigError("config.delta needs exactly one of 'value' or 'observed_at'");
  }
  one_of(delta.units, {"model", "raw"}, "config.delta.units");
  one_of(direction, {"above", "below"}, "config.direction");
  one_of(engine.schedule.spacing, {"list", "linear", "log10"}, "config.engine.schedule.spacing");
  if (engine.schedule.spacing != "list" && engine.schedule.count < 1) {
    throw ConfigError("config.engine.schedule.count must be >= 1");
  }
  const auto eps = engine.schedule.epsilons();
  if (eps.empty()) throw ConfigError("config.engine.schedule is empty");
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] >= 0.0) || !std::isfinite(eps[i])) throw ConfigError("epsilon values must be finite and >= 0");
    if (engine.type == EngineKind::Warp && !(eps[i] > 0.0)) throw ConfigError("warp epsilon values must be > 0");
    if (i > 0 && !(eps[i] > eps[i - 1])) throw ConfigError("epsilon schedule must be strictly increasing");
  }
  if (engine.crossing_tolerance && !(*engine.crossing_tolerance >= 0.0)) {
    throw ConfigError("config.engine.crossing_tolerance must be >= 0");
  }
  const SpectralConfig& s = engine.spectral;
  if (s.grid_size < 2) throw ConfigError("config.engine.spectral.grid_size must be >= 2");
  if (s.max_frequency && !(*s.max_frequency > 0.0)) throw ConfigError("config.engine.spectral.max_frequency must be > 0");
  if (!(s.tail_threshold > 0.0 && s.tail_threshold < 1.0)) throw ConfigError("config.engine.spectral.tail_threshold must lie in (0, 1)");
  if (s.steps < 0 || s.restarts < 1) throw ConfigError("config.engine.spectral needs steps >= 0 and restarts >= 1");
  if (!(s.step_size > 0.0)) throw ConfigError("config.engine.spectral.step_size must be > 0");
  one_of(s.step_rule, {"gradient", "box-scaled"}, "config.engine.spectral.step_rule");
  const WarpConfig& w = engine.warp;
  for (int h : w.hidden) {
    if (h < 1) throw ConfigError("config.engine.warp.hidden sizes must be >= 1");
  }
  if (!(w.init_scale >= 0.0)) throw ConfigError("config.engine.warp.init_scale must be >= 0");
  if (w.steps < 0 || w.restarts < 1) throw ConfigError("config.engine.warp needs steps >= 0 and restarts >= 1");
  if (!(w.step_size > 0.0)) throw ConfigError("config.engine.warp.step_size must be > 0");
  one_of(w.flags, {"except-periodic", "all", "nodes"}, "config.engine.warp.flags");
  if (w.flags == "nodes" && w.flag_nodes.empty()) throw ConfigError("config.engine.warp.nodes is empty");
  if (diagnostics.samples < 1) throw ConfigError("config.diagnostics.samples must be >= 1");
  one_of(diagnostics.rule, {"max", "quantile"}, "config.diagnostics.rule");
  if (!(diagnostics.q > 0.0 && diagnostics.q < 1.0)) throw ConfigError("config.diagnostics.q must lie in (0, 1)");
  if (diagnostics.draws < 1) throw ConfigError("config.diagnostics.draws must be >= 1");
  if (diagnostics.draw_points < 2) throw ConfigError("config.diagnostics.draw_points must be >= 2");
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  Reader root(j, "");
  if (root.has("data")) {
    Reader r(root.at("data"), "data");
    r.get("source", c.data.source);
    r.get("seed", c.data.synthetic_seed);
    r.get("path", c.data.path);
    std::string fmt = csv_format_name(c.data.format);
    r.get("format", fmt);
    c.data.format = parse_csv_format(fmt);
    r.get("x_min", c.data.x_min);
    r.get("x_max", c.data.x_max);
    r.finish();
  }
  root.get("preprocess", c.preprocess);
  root.get("kernel", c.kernel);
  if (root.has("fit")) {
    Reader r(root.at("fit"), "fit");
    r.get("restarts", c.fit.restarts);
    r.get("noise_variance", c.fit.initial_noise_variance);
    r.get("fix_noise", c.fit.fix_noise);
    r.get("mean", c.fit.mean);
    r.get("mean_value", c.fit.mean_value);
    r.get("optimizer", c.fit.optimizer);
    r.get("max_iterations", c.fit.max_iterations);
    r.finish();
  }
  if (root.has("functional")) {
    Reader r(root.at("functional"), "functional");
    r.get("kind", c.functional.kind);
    std::vector<double> xs;
    r.get("x_star", xs);
    c.functional.x_star = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    r.get("q", c.functional.q);
    r.get("include_noise", c.functional.include_noise);
    r.finish();
  }
  if (root.has("delta")) {
    if (root.at("delta").is_number()) {
      c.delta.value = root.at("delta").get<double>();
    } else {
      Reader r(root.at("delta"), "delta");
      r.get("value", c.delta.value);
      r.get("observed_at", c.delta.observed_at);
      r.get("units", c.delta.units);
      r.finish();
    }
  }
  root.get("direction", c.direction);
  if (root.has("engine")) {
    Reader r(root.at("engine"), "engine");
    std::string type = engine_name(c.engine.type);
    r.get("type", type);
    one_of(type, {"spectral", "warp"}, "config.engine.type");
    c.engine.type = type == "spectral" ? EngineKind::Spectral : EngineKind::Warp;
    if (r.has("schedule")) {
      const Json& s = r.at("schedule");
      if (s.is_array()) {
        c.engine.schedule.spacing = "list";
        r.get("schedule", c.engine.schedule.values);
      } else {
        Reader sr(s, "engine.schedule");
        sr.get("spacing", c.engine.schedule.spacing);
        sr.get("values", c.engine.schedule.values);
        sr.get("from", c.engine.schedule.from);
        sr.get("to", c.engine.schedule.to);
        sr.get("count", c.engine.schedule.count);
        sr.finish();
      }
    }
    r.get("crossing_tolerance", c.engine.crossing_tolerance);
    if (r.has("spectral")) {
      Reader sr(r.at("spectral"), "engine.spectral");
      SpectralConfig& s = c.engine.spectral;
      sr.get("grid_size", s.grid_size);
      sr.get("max_frequency", s.max_frequency);
      sr.get("tail_threshold", s.tail_threshold);
      sr.get("steps", s.steps);
      sr.get("step_size", s.step_size);
      sr.get("step_rule", s.step_rule);
      sr.get("restarts", s.restarts);
      sr.get("warm_start", s.warm_start);
      sr.finish();
    }
    if (r.has("warp")) {
      Reader wr(r.at("warp"), "engine.warp");
      WarpConfig& w = c.engine.warp;
      wr.get("hidden", w.hidden);
      wr.get("init_scale", w.init_scale);
      wr.get("steps", w.steps);
      wr.get("step_size", w.step_size);
      wr.get("restarts", w.restarts);
      wr.get("flags", w.flags);
      if (wr.has("nodes")) {
        std::vector<int> nodes;
        wr.get("nodes", nodes);
        w.flag_nodes.clear();
        for (int n : nodes) {
          if (n < 0) throw ConfigError("config.engine.warp.nodes must be non-negative");
          w.flag_nodes.push_back(static_cast<std::size_t>(n));
        }
      }
      if (wr.has("regularizer_grid")) {
        try {
          w.regularizer_grid = matrix_from_json(wr.at("regularizer_grid"));
        } catch (const InputError&) {
          throw ConfigError("config.engine.warp.regularizer_grid must be an array of points");
        }
      }
      wr.get("warm_start", w.warm_start);
      wr.finish();
    }
    r.finish();
  }
  if (root.has("diagnostics")) {
    Reader r(root.at("diagnostics"), "diagnostics");
    r.get("samples", c.diagnostics.samples);
    r.get("rule", c.diagnostics.rule);
    r.get("q", c.diagnostics.q);
    r.get("draws", c.diagnostics.draws);
    r.get("draw_points", c.diagnostics.draw_points);
    r.finish();
  }
  root.get("seed", c.seed);
  root.get("output", c.output);
  root.finish();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  Json j;
  try {
    j = Json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("cannot parse config '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

Json config_to_json(const RunConfig& c) {
  Json j;
  Json data;
  data["source"] = c.data.source;
  if (c.data.source == "synthetic") {
    data["seed"] = c.data.synthetic_seed;
  } else {
    data["path"] = c.data.path;
    data["format"] = csv_format_name(c.data.format);
  }
  if (c.data.x_min) data["x_min"] = *c.data.x_min;
  if (c.data.x_max) data["x_max"] = *c.data.x_max;
  j["data"] = data;
  j["preprocess"] = c.preprocess;
  j["kernel"] = c.kernel;
  Json fit;
  fit["restarts"] = c.fit.restarts;
  fit["noise_variance"] = c.fit.initial_noise_variance;
  fit["fix_noise"] = c.fit.fix_noise;
  fit["mean"] = c.fit.mean;
  fit["mean_value"] = c.fit.mean_value;
  fit["optimizer"] = c.fit.optimizer;
  fit["max_iterations"] = c.fit.max_iterations;
  j["fit"] = fit;
  Json fn;
  fn["kind"] = c.functional.kind;
  fn["x_star"] = vector_to_json(c.functional.x_star);
  fn["q"] = c.functional.q;
  fn["include_noise"] = c.functional.include_noise;
  j["functional"] = fn;
  Json delta;
  if (c.delta.value) delta["value"] = *c.delta.value;
  if (c.delta.observed_at) delta["observed_at"] = *c.delta.observed_at;
  delta["units"] = c.delta.units;
  j["delta"] = delta;
  j["direction"] = c.direction;
  Json engine;
  engine["type"] = engine_name(c.engine.type);
  Json sched;
  sched["spacing"] = c.engine.schedule.spacing;
  if (c.engine.schedule.spacing == "list") {
    sched["values"] = c.engine.schedule.values;
  } else {
    sched["from"] = c.engine.schedule.from;
    sched["to"] = c.engine.schedule.to;
    sched["count"] = c.engine.schedule.count;
  }
  engine["schedule"] = sched;
  if (c.engine.crossing_tolerance) engine["crossing_tolerance"] = *c.engine.crossing_tolerance;
  const SpectralConfig& s = c.engine.spectral;
  Json sj;
  sj["grid_size"] = s.grid_size;
  if (s.max_frequency) sj["max_frequency"] = *s.max_frequency;
  sj["tail_threshold"] = s.tail_threshold;
  sj["steps"] = s.steps;
  sj["step_size"] = s.step_size;
  sj["step_rule"] = s.step_rule;
  sj["restarts"] = s.restarts;
  sj["warm_start"] = s.warm_start;
  engine["spectral"] = sj;
  const WarpConfig& w = c.engine.warp;
  Json wj;
  wj["hidden"] = w.hidden;
  wj["init_scale"] = w.init_scale;
  wj["steps"] = w.steps;
  wj["step_size"] = w.step_size;
  wj["restarts"] = w.restarts;
  wj["flags"] = w.flags;
  if (w.flags == "nodes") wj["nodes"] = w.flag_nodes;
  if (w.regularizer_grid.rows() > 0) wj["regularizer_grid"] = matrix_to_json(w.regularizer_grid);
  wj["warm_start"] = w.warm_start;
  engine["warp"] = wj;
  j["engine"] = engine;
  Json diag;
  diag["samples"] = c.diagnostics.samples;
  diag["rule"] = c.diagnostics.rule;
  diag["q"] = c.diagnostics.q;
  diag["draws"] = c.diagnostics.draws;
  diag["draw_points"] = c.diagnostics.draw_points;
  j["diagnostics"] = diag;
  j["seed"] = c.seed;
  j["output"] = c.output;
  return j;
}

}  // namespace gpsens
