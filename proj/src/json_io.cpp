#include "gpsens/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

void write_string(std::string& out, const std::string& s) {
  out += '"';
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
}

void write_value(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad;
        write_string(out, it.key());
        out += indent > 0 ? ": " : ":";
        write_value(out, it.value(), indent, depth + 1);
      }
      out += nl;
      out += close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) {
          out += nl;
          out += pad;
        }
        write_value(out, e, indent, depth + 1);
      }
      if (!flat) {
        out += nl;
        out += close_pad;
      }
      out += "]";
      return;
    }
    case Json::value_t::string:
      write_string(out, j.get_ref<const std::string&>());
      return;
    case Json::value_t::boolean:
      out += j.get<bool>() ? "true" : "false";
      return;
    case Json::value_t::number_integer:
      out += std::to_string(j.get<std::int64_t>());
      return;
    case Json::value_t::number_unsigned:
      out += std::to_string(j.get<std::uint64_t>());
      return;
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += "null";
  }
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string("expected a number for ") + what);
  return j.get<double>();
}

Json node_to_json(const Kernel& k, std::vector<const WarpNet*>& nets, Json& warps) {
  Json j;
  j["kind"] = std::string(kind_name(k.kind()));
  switch (k.kind()) {
    case KernelKind::Sum:
    case KernelKind::Product: {
      Json kids = Json::array();
      for (const Kernel& c : k.children()) kids.push_back(node_to_json(c, nets, warps));
      j["children"] = kids;
      break;
    }
    case KernelKind::Warped: {
      const WarpNet* net = k.warp_net().get();
      std::size_t ref = 0;
      while (ref < nets.size() && nets[ref] != net) ++ref;
      if (ref == nets.size()) {
        nets.push_back(net);
        warps.push_back(warp_net_to_json(*net));
      }
      j["warp_ref"] = ref;
      j["child"] = node_to_json(k.children().front(), nets, warps);
      break;
    }
    case KernelKind::Spectral:
      j["frequencies"] = vector_to_json(k.grid().frequencies);
      j["density"] = vector_to_json(k.grid().density);
      break;
    default: {
      Json params = Json::array();
      Json fixed = Json::array();
      const auto roles = k.param_roles();
      for (std::size_t i = 0; i < k.params().size(); ++i) {
        params.push_back(k.param(i));
        fixed.push_back(k.is_fixed(i));
      }
      j["roles"] = roles;
      j["params"] = params;
      j["fixed"] = fixed;
    }
  }
  return j;
}

Kernel node_from_json(const Json& j, const std::vector<std::shared_ptr<const WarpNet>>& nets) {
  if (!j.is_object() || !j.contains("kind")) throw InputError("kernel node needs a 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "sum" || kind == "product") {
    std::vector<Kernel> kids;
    for (const Json& c : j.at("children")) kids.push_back(node_from_json(c, nets));
    return kind == "sum" ? Kernel::sum(std::move(kids)) : Kernel::product(std::move(kids));
  }
  if (kind == "warped") {
    const auto ref = j.at("warp_ref").get<std::size_t>();
    if (ref >= nets.size()) throw InputError("warp_ref out of range");
    return Kernel::warped(node_from_json(j.at("child"), nets), nets[ref]);
  }
  if (kind == "spectral") {
    auto grid = std::make_shared<SpectralGrid>();
    grid->frequencies = vector_from_json(j.at("frequencies"));
    grid->density = vector_from_json(j.at("density"));
    return Kernel::spectral(grid);
  }
  const Json& p = j.at("params");
  std::vector<double> v;
  for (const Json& e : p) v.push_back(number(e, "kernel parameter"));
  Kernel k = [&] {
    if (kind == "se" && v.size() == 2) return Kernel::squared_exponential(v[0], v[1]);
    if (kind == "matern52" && v.size() == 2) return Kernel::matern52(v[0], v[1]);
    if (kind == "periodic" && v.size() == 3) return Kernel::periodic(v[0], v[1], v[2]);
    if (kind == "rq" && v.size() == 3) return Kernel::rational_quadratic(v[0], v[1], v[2]);
    throw InputError("unknown kernel kind '" + kind + "' or wrong parameter count");
  }();
  if (j.contains("fixed")) {
    const Json& f = j.at("fixed");
    if (f.size() != v.size()) throw InputError("'fixed' must have one flag per parameter");
    for (std::size_t i = 0; i < v.size(); ++i) k.fix(i, f[i].get<bool>());
  }
  return k;
}

}  // namespace

std::string dump_json(const Json& value, int indent) {
  std::string out;
  write_value(out, value, indent, 0);
  out += '\n';
  return out;
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("cannot parse " + what + ": " + e.what());
  }
}

Json vector_to_json(const Vector& v) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], "array entry");
  return v;
}

Json matrix_to_json(const Matrix& m) {
  Json j = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) j.push_back(vector_to_json(m.row(i).transpose()));
  return j;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of rows");
  if (j.empty()) return Matrix(0, 0);
  const Vector first = vector_from_json(j[0]);
  Matrix m(static_cast<Eigen::Index>(j.size()), first.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Vector row = vector_from_json(j[i]);
    if (row.size() != first.size()) throw InputError("ragged matrix");
    m.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return m;
}

Json warp_net_to_json(const WarpNet& net) {
  Json layers = Json::array();
  for (const WarpNet::Layer& l : net.layers()) {
    Json lj;
    lj["weight"] = matrix_to_json(l.weight);
    lj["bias"] = vector_to_json(l.bias);
    layers.push_back(lj);
  }
  Json j;
  j["dim"] = net.dim();
  j["hidden"] = net.hidden_sizes();
  j["layers"] = layers;
  return j;
}

WarpNet warp_net_from_json(const Json& j) {
  std::vector<WarpNet::Layer> layers;
  for (const Json& lj : j.at("layers")) {
    WarpNet::Layer l;
    l.weight = matrix_from_json(lj.at("weight"));
    l.bias = vector_from_json(lj.at("bias"));
    layers.push_back(std::move(l));
  }
  return WarpNet(std::move(layers));
}

Json kernel_to_json(const Kernel& k) {
  std::vector<const WarpNet*> nets;
  Json warps = Json::array();
  Json expr = node_to_json(k, nets, warps);
  Json j;
  j["expr"] = expr;
  j["warps"] = warps;
  if (!k.contains(KernelKind::Spectral) && !k.contains(KernelKind::Warped)) j["text"] = k.to_string();
  return j;
}

Kernel kernel_from_json(const Json& j) {
  if (j.is_string()) return parse_kernel(j.get<std::string>());
  std::vector<std::shared_ptr<const WarpNet>> nets;
  if (j.contains("warps")) {
    for (const Json& w : j.at("warps")) nets.push_back(std::make_shared<const WarpNet>(warp_net_from_json(w)));
  }
  return node_from_json(j.at("expr"), nets);
}

Json functional_to_json(const FunctionalSpec& spec) {
  Json j;
  j["kind"] = functional_kind_name(spec.kind);
  j["x_star"] = vector_to_json(spec.x_star);
  if (spec.kind == FunctionalKind::PosteriorQuantile) {
    j["q"] = spec.q;
    j["include_noise"] = spec.include_noise;
  }
  if (spec.kind == FunctionalKind::RelativeChange) {
    j["baseline_mean"] = spec.baseline_mean;
    j["baseline_std"] = spec.baseline_std;
  }
  return j;
}

FunctionalSpec functional_from_json(const Json& j) {
  FunctionalSpec s;
  s.kind = parse_functional_kind(j.at("kind").get<std::string>());
  s.x_star = vector_from_json(j.at("x_star"));
  if (j.contains("q")) s.q = number(j.at("q"), "q");
  if (j.contains("include_noise")) s.include_noise = j.at("include_noise").get<bool>();
  if (j.contains("baseline_mean")) s.baseline_mean = number(j.at("baseline_mean"), "baseline_mean");
  if (j.contains("baseline_std")) s.baseline_std = number(j.at("baseline_std"), "baseline_std");
  return s;
}

Json report_to_json(const SensitivityReport& r, const Kernel& k0) {
  Json j;
  j["schema"] = kReportSchema;
  j["engine"] = engine_name(r.engine);
  j["functional"] = functional_to_json(r.functional);
  j["delta"] = r.delta;
  j["direction"] = r.direction > 0 ? "above" : "below";
  j["crossing_tolerance"] = r.crossing_tolerance;
  j["baseline_value"] = r.baseline_value;
  Json sched = Json::array();
  for (const ScheduleEntry& e : r.schedule) {
    Json ej;
    ej["epsilon"] = e.epsilon;
    ej["best_value"] = e.value;
    if (r.engine == EngineKind::Warp) ej["objective"] = e.objective;
    ej["best_restart"] = e.best_restart;
    ej["crossed"] = e.crossed;
    Json rs = Json::array();
    for (const SpectralRestart& s : e.spectral_restarts) {
      Json sj;
      sj["index"] = s.index;
      sj["origin"] = s.origin;
      sj["start_value"] = s.start_value;
      sj["value"] = s.value;
      sj["steps"] = s.steps;
      sj["status"] = s.status;
      rs.push_back(sj);
    }
    for (const WarpRestart& w : e.warp_restarts) {
      Json wj;
      wj["index"] = w.index;
      wj["origin"] = w.origin;
      wj["start_objective"] = w.start_objective;
      wj["objective"] = w.objective;
      wj["value"] = w.functional;
      wj["steps"] = w.steps;
      wj["status"] = w.status;
      wj["trace"] = w.trace;
      rs.push_back(wj);
    }
    ej["restarts"] = rs;
    sched.push_back(ej);
  }
  j["schedule"] = sched;
  j["decision_changed"] = r.crossed;
  j["k0"] = kernel_to_json(k0);
  Json k1;
  k1["epsilon"] = r.k1_epsilon;
  k1["value"] = r.k1_value;
  k1["kernel"] = kernel_to_json(r.k1);
  j["k1"] = k1;
  const FrobeniusComparison& c = r.comparison;
  Json d;
  d["rule"] = c.rule.name();
  d["reference_norm"] = c.reference_norm;
  d["candidate"] = c.candidate;
  d["threshold"] = c.threshold;
  d["verdict"] = c.interchangeable ? "interchangeable" : "not interchangeable";
  d["samples"] = c.samples;
  Json lap;
  lap["mode"] = vector_to_json(r.hyper_posterior.mode);
  lap["covariance"] = matrix_to_json(r.hyper_posterior.covariance);
  d["laplace"] = lap;
  Json draws;
  draws["series"] = r.draws.labels;
  draws["n_draws"] = r.draws.z.cols();
  draws["points"] = r.draws.points.rows();
  d["draws"] = draws;
  d["note"] =
      "The machine verdict uses the Gram-matrix comparison. The noise-matched prior draws are evidence for the "
      "analyst, who may override the interchangeability call.";
  j["diagnostics"] = d;
  j["warnings"] = r.warnings;
  j["verdict"] = r.verdict;
  return j;
}

std::string reassemble_verdict(const Json& report) {
  const double delta = number(report.at("delta"), "delta");
  const double dir = report.at("direction").get<std::string>() == "below" ? -1.0 : 1.0;
  const double tol = number(report.at("crossing_tolerance"), "crossing_tolerance");
  bool crossed = false;
  for (const Json& e : report.at("schedule")) {
    const Json& v = e.at("best_value");
    if (v.is_number() && dir * v.get<double>() >= dir * delta - tol) {
      crossed = true;
      break;
    }
  }
  const bool interchangeable = report.at("diagnostics").at("verdict").get<std::string>() == "interchangeable";
  return assemble_verdict(crossed, interchangeable);
}

}  // namespace gpsens
