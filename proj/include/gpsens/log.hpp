#pragma once

#include <string>

namespace gpsens {

// GPSENS_VERBOSITY: 0 silent, 1 warnings (default), 2 progress, 3 debug.
int verbosity();
void set_verbosity(int level);

void log_warning(const std::string& message);
void log_info(const std::string& message);
void log_debug(const std::string& message);

}  // namespace gpsens
