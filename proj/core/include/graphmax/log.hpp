#pragma once

#include <string>

namespace graphmax {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

// Level comes from GRAPHMAX_LOG (error|info|debug) on first use; default info.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace graphmax
