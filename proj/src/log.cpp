#include "rkrfm/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace rkrfm {

namespace {
std::atomic<LogLevel> g_level{LogLevel::Warn};
std::mutex g_mutex;

void emit(const char* tag, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log_warn(const std::string& msg) {
    if (g_level >= LogLevel::Warn) emit("warn", msg);
}

void log_info(const std::string& msg) {
    if (g_level >= LogLevel::Info) emit("info", msg);
}

}  // namespace rkrfm
