#include "heatnet/log.hpp"

#include <cstdio>
#include <cstdlib>

namespace heatnet {

namespace {

LogLevel g_level = [] {
  const char* env = std::getenv("HEATNET_LOG");
  if (!env) return LogLevel::kInfo;
  const std::string v(env);
  if (v == "error") return LogLevel::kError;
  if (v == "debug") return LogLevel::kDebug;
  return LogLevel::kInfo;
}();

void emit(const char* tag, const std::string& msg) {
  std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() { return g_level; }
void set_log_level(LogLevel level) { g_level = level; }

void log_error(const std::string& msg) { emit("error", msg); }

void log_info(const std::string& msg) {
  if (g_level >= LogLevel::kInfo) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (g_level >= LogLevel::kDebug) emit("debug", msg);
}

}  // namespace heatnet
