#pragma once

#include <string>

namespace rkrfm {

enum class LogLevel { Quiet = 0, Warn = 1, Info = 2 };

void set_log_level(LogLevel level);
LogLevel log_level();
void log_warn(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace rkrfm
