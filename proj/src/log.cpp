#include "colorgpt/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace colorgpt {
namespace {

LogLevel initial_level() {
  const char* env = std::getenv("COLORGPT_LOG");
  if (!env) return LogLevel::Warn;
  const std::string v = env;
  if (v == "debug") return LogLevel::Debug;
  if (v == "info") return LogLevel::Info;
  if (v == "error") return LogLevel::Error;
  if (v == "off") return LogLevel::Off;
  return LogLevel::Warn;
}

std::atomic<LogLevel>& level_ref() {
  static std::atomic<LogLevel> level{initial_level()};
  return level;
}

constexpr const char* tag(LogLevel l) {
  switch (l) {
    case LogLevel::Debug: return "debug";
    case LogLevel::Info: return "info";
    case LogLevel::Warn: return "warn";
    case LogLevel::Error: return "error";
    case LogLevel::Off: break;
  }
  return "";
}

}  // namespace

void set_log_level(LogLevel level) { level_ref() = level; }
LogLevel log_level() { return level_ref(); }

void log(LogLevel level, std::string_view message) {
  if (level < level_ref() || level == LogLevel::Off) return;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::clog << "[colorgpt " << tag(level) << "] " << message << '\n';
}

}  // namespace colorgpt
