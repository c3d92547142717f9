#pragma once

#include <string>

#include "gpsens/diagnostics.hpp"

namespace gpsens {

// Minimal static SVG figures from plot data.
std::string render_draws_svg(const PlotData& draws);
std::string render_histogram_svg(const PlotData& histogram);

}  // namespace gpsens
