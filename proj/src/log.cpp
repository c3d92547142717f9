#include "gpsens/log.hpp"

#include <cstdlib>
#include <iostream>

namespace gpsens {

namespace {

int& level() {
  static int value = [] {
    const char* env = std::getenv("GPSENS_VERBOSITY");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    return (*end == '\0') ? static_cast<int>(v) : 1;
  }();
  return value;
}

void emit(const char* tag, const std::string& message) { std::cerr << "gpsens: " << tag << message << '\n'; }

}  // namespace

int verbosity() { return level(); }
void set_verbosity(int v) { level() = v; }

void log_warning(const std::string& message) {
  if (level() >= 1) emit("warning: ", message);
}
void log_info(const std::string& message) {
  if (level() >= 2) emit("", message);
}
void log_debug(const std::string& message) {
  if (level() >= 3) emit("debug: ", message);
}

}  // namespace gpsens
