#include "gpsens/data.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool to_number(const std::string& cell, double& out) {
  if (cell.empty()) return false;
  char* end = nullptr;
  out = std::strtod(cell.c_str(), &end);
  return end && *end == '\0' && std::isfinite(out);
}

Dataset make_dataset(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  Dataset d;
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto dim = static_cast<Eigen::Index>(x.empty() ? 0 : x.front().size());
  d.x.resize(n, dim);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) d.x(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    d.y[i] = y[static_cast<std::size_t>(i)];
  }
  return d;
}

LoadedData parse_generic(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!trim(line).empty()) {
      columns = split(line).size();
      break;
    }
  }
  if (columns < 2) throw InputError("CSV needs a header with at least one input and one output column");
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    if (cells.size() != columns) {
      throw InputError("line " + std::to_string(lineno) + ": expected " + std::to_string(columns) + " columns");
    }
    std::vector<double> row(columns);
    for (std::size_t c = 0; c < columns; ++c) {
      if (!to_number(cells[c], row[c])) {
        throw InputError("line " + std::to_string(lineno) + ": cannot parse '" + cells[c] + "' as a number");
      }
    }
    ys.push_back(row.back());
    row.pop_back();
    xs.push_back(std::move(row));
  }
  if (ys.empty()) throw InputError("CSV contains no data rows");
  LoadedData out;
  out.data = make_dataset(xs, ys);
  out.rows = ys.size();
  return out;
}

LoadedData parse_mauna_loa(const std::string& text) {
  constexpr std::size_t kDate = 3;
  constexpr std::size_t kCo2 = 4;
  constexpr double kMissing = -99.99;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool started = false;
  std::vector<std::vector<double>> xs;
  std::vector<double> ys;
  LoadedData out;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '"' || t.front() == '#') continue;
    const auto cells = split(t);
    double date = 0.0;
    double co2 = 0.0;
    const bool ok = cells.size() > kCo2 && to_number(cells[0], date) && to_number(cells[kDate], date) &&
                    to_number(cells[kCo2], co2);
    if (!ok) {
      if (!started) continue;  // column header rows
      throw InputError("Mauna Loa line " + std::to_string(lineno) + ": cannot parse date/CO2 columns");
    }
    started = true;
    ++out.rows;
    if (std::abs(co2 - kMissing) < 1e-9) {
      ++out.dropped;
      continue;
    }
    xs.push_back({date});
    ys.push_back(co2);
  }
  if (ys.empty()) throw InputError("Mauna Loa file has no usable rows");
  out.data = make_dataset(xs, ys);
  return out;
}

}  // namespace

std::string csv_format_name(CsvFormat format) { return format == CsvFormat::Generic ? "generic" : "maunaloa"; }

CsvFormat parse_csv_format(const std::string& name) {
  if (name == "generic") return CsvFormat::Generic;
  if (name == "maunaloa") return CsvFormat::MaunaLoa;
  throw ConfigError("unknown CSV format '" + name + "' (expected generic or maunaloa)");
}

LoadedData parse_csv(const std::string& text, CsvFormat format) {
  return format == CsvFormat::Generic ? parse_generic(text) : parse_mauna_loa(text);
}

LoadedData load_csv(const std::string& path, CsvFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str(), format);
}

Dataset filter_inputs(const Dataset& data, double lo, double hi) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    if (data.x(i, 0) >= lo && data.x(i, 0) < hi) keep.push_back(i);
  }
  if (keep.empty()) throw InputError("no data rows left inside the input range");
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(keep.size()), data.x.cols());
  out.y.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.x.row(static_cast<Eigen::Index>(k)) = data.x.row(keep[k]);
    out.y[static_cast<Eigen::Index>(k)] = data.y[keep[k]];
  }
  return out;
}

std::string preprocess_mode_name(PreprocessMode mode) {
  switch (mode) {
    case PreprocessMode::None: return "none";
    case PreprocessMode::Log: return "log";
    case PreprocessMode::Standardize: return "standardize";
    case PreprocessMode::LogStandardize: return "log+standardize";
  }
  return "none";
}

PreprocessMode parse_preprocess_mode(const std::string& name) {
  if (name == "none") return PreprocessMode::None;
  if (name == "log") return PreprocessMode::Log;
  if (name == "standardize") return PreprocessMode::Standardize;
  if (name == "log+standardize") return PreprocessMode::LogStandardize;
  throw ConfigError("unknown preprocessing mode '" + name + "'");
}

double Transform::apply(double y) const { return ((uses_log() ? std::log(y) : y) - shift) / scale; }

double Transform::invert(double z) const {
  const double v = z * scale + shift;
  return uses_log() ? std::exp(v) : v;
}

Vector Transform::apply(const Vector& y) const { return y.unaryExpr([this](double v) { return apply(v); }); }

Vector Transform::invert(const Vector& z) const { return z.unaryExpr([this](double v) { return invert(v); }); }

Preprocessed preprocess(const Dataset& data, PreprocessMode mode) {
  Preprocessed out{data, Transform{mode, 0.0, 1.0}};
  Vector y = data.y;
  if (out.transform.uses_log()) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (!(y[i] > 0.0)) throw InputError("log transform needs positive outputs; y[" + std::to_string(i) + "] is not");
    }
    y = y.array().log().matrix();
  }
  if (mode == PreprocessMode::Standardize || mode == PreprocessMode::LogStandardize) {
    if (y.size() < 2) throw InputError("standardizing needs at least two observations");
    const double mean = y.mean();
    const double var = (y.array() - mean).square().sum() / static_cast<double>(y.size() - 1);
    if (!(var > 0.0)) throw InputError("cannot standardize outputs with zero variance");
    out.transform.shift = mean;
    out.transform.scale = std::sqrt(var);
    y = ((y.array() - mean) / out.transform.scale).matrix();
  }
  out.data.y = y;
  return out;
}

Dataset generate_synthetic(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> wide(0.0, 5.0);
  std::uniform_real_distribution<double> narrow(1.9, 2.1);
  std::normal_distribution<double> noise(0.0, 0.1);
  Dataset d;
  d.x.resize(35, 1);
  d.y.resize(35);
  for (Eigen::Index i = 0; i < 35; ++i) d.x(i, 0) = i < 25 ? wide(rng) : narrow(rng);
  for (Eigen::Index i = 0; i < 35; ++i) {
    const double x = d.x(i, 0);
    d.y[i] = 0.5 * x * x + std::cos(std::numbers::pi * x) + noise(rng);
  }
  return d;
}

}  // namespace gpsens
