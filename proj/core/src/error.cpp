#include "gwd/error.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace gwd {

LogLevel log_level() {
  static LogLevel level = [] {
    const char* env = std::getenv("GWD_LOG");
    if (env == nullptr) return LogLevel::Error;
    if (std::strcmp(env, "off") == 0) return LogLevel::Off;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Error;
  }();
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_line(LogLevel level, const std::string& message) {
  if (!log_enabled(level)) return;
  std::fprintf(stderr, "[gwd] %s\n", message.c_str());
}

}  // namespace gwd
