#include "gpsens/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "gpsens/error.hpp"

namespace gpsens {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 400.0;
constexpr double kMargin = 48.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Frame {
  double x0, x1, y0, y1;
  double sx(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double sy(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

Frame frame_for(double x0, double x1, double y0, double y1) {
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

std::string header() {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

std::string axes(const Frame& f, const std::string& title) {
  std::string s;
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" + num(kWidth - kMargin) +
       "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) + "\" y2=\"" +
       num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kHeight - kMargin + 16) + "\">" + label(f.x0) + "</text>\n";
  s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kHeight - kMargin + 16) +
       "\" text-anchor=\"end\">" + label(f.x1) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kHeight - kMargin) + "\" text-anchor=\"end\">" +
       label(f.y0) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kMargin + 4) + "\" text-anchor=\"end\">" + label(f.y1) +
       "</text>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kMargin / 2) + "\" text-anchor=\"middle\" font-size=\"14\">" +
       title + "</text>\n";
  return s;
}

}  // namespace

std::string render_draws_svg(const PlotData& draws) {
  if (draws.empty()) throw ValidationError("no draws to render");
  std::map<std::string, std::map<long, std::vector<std::pair<double, double>>>> curves;
  std::vector<std::string> order;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const PlotRow& r : draws) {
    if (!curves.count(r.series)) order.push_back(r.series);
    curves[r.series][r.index].push_back({r.point, r.value});
    x0 = std::min(x0, r.point);
    x1 = std::max(x1, r.point);
    y0 = std::min(y0, r.value);
    y1 = std::max(y1, r.value);
  }
  const Frame f = frame_for(x0, x1, y0, y1);
  std::string s = header();
  if (curves.count("band_lower") && curves.count("band_upper")) {
    const auto& lo = curves["band_lower"][0];
    const auto& hi = curves["band_upper"][0];
    std::string pts;
    for (const auto& [x, y] : hi) pts += num(f.sx(x)) + "," + num(f.sy(y)) + " ";
    for (auto it = lo.rbegin(); it != lo.rend(); ++it) pts += num(f.sx(it->first)) + "," + num(f.sy(it->second)) + " ";
    s += "<polygon points=\"" + pts + "\" fill=\"#cccccc\" fill-opacity=\"0.6\" stroke=\"none\"/>\n";
  }
  std::size_t color = 0;
  double legend_y = kMargin;
  for (const std::string& name : order) {
    if (name == "band_lower" || name == "band_upper") continue;
    const char* c = kPalette[color++ % (sizeof kPalette / sizeof *kPalette)];
    for (const auto& [idx, pts] : curves[name]) {
      std::string p;
      for (const auto& [x, y] : pts) p += num(f.sx(x)) + "," + num(f.sy(y)) + " ";
      s += "<polyline points=\"" + p + "\" fill=\"none\" stroke=\"" + c + "\" stroke-width=\"1.2\"" +
           (color > 1 ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
    }
    s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(legend_y) + "\" text-anchor=\"end\" fill=\"" + c +
         "\">" + name + "</text>\n";
    legend_y += 14;
  }
  s += axes(f, "Noise-matched prior draws");
  s += "</svg>\n";
  return s;
}

std::string render_histogram_svg(const PlotData& histogram) {
  std::vector<double> samples;
  double candidate = std::numeric_limits<double>::quiet_NaN();
  for (const PlotRow& r : histogram) {
    if (r.series == "laplace_sample") samples.push_back(r.value);
    if (r.series == "candidate") candidate = r.value;
  }
  if (samples.empty()) throw ValidationError("no histogram samples to render");
  double lo = *std::min_element(samples.begin(), samples.end());
  double hi = *std::max_element(samples.begin(), samples.end());
  if (std::isfinite(candidate)) {
    lo = std::min(lo, candidate);
    hi = std::max(hi, candidate);
  }
  if (!(hi > lo)) hi = lo + 1.0;
  constexpr int kBins = 30;
  std::vector<int> counts(kBins, 0);
  for (double v : samples) {
    const int b = std::min(kBins - 1, static_cast<int>((v - lo) / (hi - lo) * kBins));
    ++counts[static_cast<std::size_t>(b)];
  }
  const int peak = *std::max_element(counts.begin(), counts.end());
  Frame f{lo, hi, 0.0, static_cast<double>(peak) * 1.1};
  std::string s = header();
  for (int b = 0; b < kBins; ++b) {
    const double a = lo + (hi - lo) * b / kBins;
    const double z = lo + (hi - lo) * (b + 1) / kBins;
    const double top = f.sy(counts[static_cast<std::size_t>(b)]);
    s += "<rect x=\"" + num(f.sx(a)) + "\" y=\"" + num(top) + "\" width=\"" + num(f.sx(z) - f.sx(a)) +
         "\" height=\"" + num(f.sy(0) - top) + "\" fill=\"#1f77b4\" fill-opacity=\"0.7\"/>\n";
  }
  if (std::isfinite(candidate)) {
    s += "<line x1=\"" + num(f.sx(candidate)) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(f.sx(candidate)) +
         "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  }
  s += axes(f, "Relative Frobenius distance to k0(X, X)");
  s += "</svg>\n";
  return s;
}

}  // namespace gpsens
