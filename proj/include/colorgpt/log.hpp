#pragma once

#include <string_view>

namespace colorgpt {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

/// Process-wide threshold. Defaults to Warn, or COLORGPT_LOG (debug|info|warn|error|off).
void set_log_level(LogLevel level);
LogLevel log_level();

/// Thread-safe line logging to stderr.
void log(LogLevel level, std::string_view message);
inline void log_debug(std::string_view m) { log(LogLevel::Debug, m); }
inline void log_info(std::string_view m) { log(LogLevel::Info, m); }
inline void log_warn(std::string_view m) { log(LogLevel::Warn, m); }

}  // namespace colorgpt
