#include "capfield/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace capfield {

LogLevel log_level() {
  static LogLevel lvl = [] {
    const char* env = std::getenv("CAPFIELD_LOG");
    if (!env) return LogLevel::error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::info;
    return LogLevel::error;
  }();
  return lvl;
}

void log_msg(LogLevel lvl, const char* fmt, ...) {
  if (static_cast<int>(lvl) > static_cast<int>(log_level())) return;
  const char* tag = lvl == LogLevel::error ? "error" : (lvl == LogLevel::info ? "info" : "debug");
  std::fprintf(stderr, "[capfield:%s] ", tag);
  va_list args;
  va_start(args, fmt);
  std::vfprintf(stderr, fmt, args);
  va_end(args);
  std::fputc('\n', stderr);
}

}  // namespace capfield
