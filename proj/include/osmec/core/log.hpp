#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

namespace osmec {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

/// Diagnostics level from OSMEC_LOG_LEVEL (error|info|debug); info default.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("OSMEC_LOG_LEVEL");
    if (!env) return LogLevel::Info;
    const std::string_view v{env};
    if (v == "error") return LogLevel::Error;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Info;
  }();
  return level;
}

inline void log_error(const std::string& msg) { std::fprintf(stderr, "error: %s\n", msg.c_str()); }

inline void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) std::fprintf(stderr, "%s\n", msg.c_str());
}

inline void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::Debug) std::fprintf(stderr, "debug: %s\n", msg.c_str());
}

}  // namespace osmec
