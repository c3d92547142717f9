#include "gpsens/diagnostics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& cell, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw InputError("plot data line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
}

}  // namespace

NormalSource seeded_normal_source(std::uint64_t seed) {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  auto dist = std::make_shared<std::normal_distribution<double>>(0.0, 1.0);
  return [rng, dist]() { return (*dist)(*rng); };
}

NoiseMatchedDraws noise_matched_draws(const std::vector<Matrix>& covariances, const std::vector<std::string>& labels,
                                      const Points& points, int n_draws, const NormalSource& normal) {
  if (covariances.empty()) throw ValidationError("noise-matched draws need at least one kernel");
  if (labels.size() != covariances.size()) throw ValidationError("one label per kernel is required");
  if (n_draws < 1) throw ValidationError("need at least one draw");
  const Eigen::Index p = points.rows();
  NoiseMatchedDraws out;
  out.points = points;
  out.labels = labels;
  out.z.resize(p, n_draws);
  for (int j = 0; j < n_draws; ++j) {
    for (Eigen::Index i = 0; i < p; ++i) out.z(i, j) = normal();
  }
  for (std::size_t k = 0; k < covariances.size(); ++k) {
    const Matrix& c = covariances[k];
    if (c.rows() != p || c.cols() != p) throw InputError("covariance of '" + labels[k] + "' has the wrong shape");
    const CholeskyFactor f = robust_cholesky(c, "prior covariance of kernel '" + labels[k] + "'");
    out.draws.push_back(f.lower.triangularView<Eigen::Lower>() * out.z);
    if (k == 0) out.band = 3.0 * c.diagonal().cwiseMax(0.0).cwiseSqrt();
  }
  return out;
}

NoiseMatchedDraws noise_matched_draws(const std::vector<Kernel>& kernels, const std::vector<std::string>& labels,
                                      const Points& points, int n_draws, std::uint64_t seed) {
  std::vector<Matrix> covs;
  for (const Kernel& k : kernels) covs.push_back(gram(k, points));
  return noise_matched_draws(covs, labels, points, n_draws, seeded_normal_source(seed));
}

Points draw_grid(const Points& x, const Vector& x_star, int count) {
  if (x.cols() != 1) throw UnsupportedError("draw grid is defined for 1-D inputs only");
  if (count < 2) throw ValidationError("draw grid needs at least two points");
  const double lo = x.minCoeff();
  const double hi = std::max(x_star[0], x.maxCoeff());
  std::vector<double> v;
  const Vector u = Vector::LinSpaced(count, lo, hi);
  v.assign(u.data(), u.data() + u.size());
  v.insert(v.end(), x.data(), x.data() + x.rows());
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  Points out(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i), 0) = v[i];
  return out;
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("relative Frobenius norm needs equal shapes");
  const double ref = b.norm();
  if (!(ref > 0.0)) throw ValidationError("reference matrix has zero Frobenius norm");
  return (a - b).norm() / ref;
}

std::string VerdictRule::name() const {
  if (kind == Kind::Max) return "max";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, q);
  return "quantile(" + std::string(buf, res.ptr) + ")";
}

double empirical_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

FrobeniusComparison compare_to_samples(double reference_norm, double candidate, std::vector<double> samples,
                                       const VerdictRule& rule) {
  if (samples.empty()) throw ValidationError("need at least one hyperparameter sample");
  FrobeniusComparison out;
  out.reference_norm = reference_norm;
  out.candidate = candidate;
  out.rule = rule;
  out.threshold = rule.kind == VerdictRule::Kind::Max ? *std::max_element(samples.begin(), samples.end())
                                                      : empirical_quantile(samples, rule.q);
  out.samples = std::move(samples);
  out.interchangeable = !(candidate > out.threshold);
  return out;
}

FrobeniusComparison frobenius_histogram(const FittedGp& gp0, const Kernel& k1, const HyperPosterior& hp, int samples,
                                        std::uint64_t seed, const VerdictRule& rule) {
  if (samples < 1) throw ValidationError("R must be at least 1");
  const Points& x = gp0.data().x;
  const Matrix k0 = gram(gp0.kernel(), x);
  const Eigen::Index nfree = static_cast<Eigen::Index>(gp0.kernel().num_free_params());
  if (hp.mode.size() < nfree) throw InputError("hyperparameter posterior does not match the kernel");
  std::vector<double> stats;
  stats.reserve(static_cast<std::size_t>(samples));
  for (const Vector& theta : sample_hyperparameters(hp, samples, seed)) {
    const Kernel kr = gp0.kernel().with_free_log_params(theta.head(nfree).array().log().matrix());
    stats.push_back(relative_frobenius(gram(kr, x), k0));
  }
  return compare_to_samples(k0.norm(), relative_frobenius(gram(k1, x), k0), std::move(stats), rule);
}

std::string emit_plot_csv(const PlotData& rows) {
  std::string out = "point,index,value,series\n";
  for (const PlotRow& r : rows) {
    if (r.series.find_first_of(",\n\"") != std::string::npos) throw ValidationError("series tag may not contain , \" or newlines");
    out += fmt17(r.point) + "," + std::to_string(r.index) + "," + fmt17(r.value) + "," + r.series + "\n";
  }
  return out;
}

PlotData parse_plot_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || line != "point,index,value,series") throw InputError("plot data: missing header");
  ++lineno;
  PlotData rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (int c = 0; c < 3; ++c) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) throw InputError("plot data line " + std::to_string(lineno) + ": expected 4 columns");
      cells.push_back(line.substr(start, comma - start));
      start = comma + 1;
    }
    cells.push_back(line.substr(start));
    const double idx = parse_number(cells[1], lineno);
    rows.push_back({parse_number(cells[0], lineno), static_cast<long>(idx), parse_number(cells[2], lineno), cells[3]});
  }
  return rows;
}

PlotData draw_report(const NoiseMatchedDraws& draws) {
  if (draws.points.cols() != 1) throw UnsupportedError("prior draws can only be plotted for 1-D inputs");
  PlotData rows;
  const Eigen::Index p = draws.points.rows();
  for (std::size_t k = 0; k < draws.draws.size(); ++k) {
    const Matrix& d = draws.draws[k];
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      for (Eigen::Index i = 0; i < p; ++i) rows.push_back({draws.points(i, 0), static_cast<long>(j), d(i, j), draws.labels[k]});
    }
  }
  for (Eigen::Index i = 0; i < p; ++i) rows.push_back({draws.points(i, 0), 0, -draws.band[i], "band_lower"});
  for (Eigen::Index i = 0; i < p; ++i) rows.push_back({draws.points(i, 0), 0, draws.band[i], "band_upper"});
  return rows;
}

PlotData histogram_report(const FrobeniusComparison& comparison) {
  PlotData rows;
  for (std::size_t r = 0; r < comparison.samples.size(); ++r) {
    rows.push_back({0.0, static_cast<long>(r), comparison.samples[r], "laplace_sample"});
  }
  rows.push_back({0.0, 0, comparison.candidate, "candidate"});
  return rows;
}

}  // namespace gpsens
