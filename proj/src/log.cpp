#include "qkd/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace qkd {

namespace {

std::atomic<int> g_level{-1};
std::mutex g_mutex;

LogLevel parse_env() {
    const char* env = std::getenv("QKD_LOG_LEVEL");
    if (!env) return LogLevel::Warn;
    if (!std::strcmp(env, "debug")) return LogLevel::Debug;
    if (!std::strcmp(env, "info")) return LogLevel::Info;
    if (!std::strcmp(env, "warn")) return LogLevel::Warn;
    if (!std::strcmp(env, "error")) return LogLevel::Error;
    if (!std::strcmp(env, "off")) return LogLevel::Off;
    return LogLevel::Warn;
}

const char* level_name(LogLevel lvl) {
    switch (lvl) {
        case LogLevel::Debug: return "debug";
        case LogLevel::Info: return "info";
        case LogLevel::Warn: return "warn";
        case LogLevel::Error: return "error";
        default: return "?";
    }
}

}  // namespace

LogLevel log_level() {
    int lvl = g_level.load(std::memory_order_relaxed);
    if (lvl < 0) {
        lvl = static_cast<int>(parse_env());
        g_level.store(lvl, std::memory_order_relaxed);
    }
    return static_cast<LogLevel>(lvl);
}

void set_log_level(LogLevel lvl) { g_level.store(static_cast<int>(lvl)); }

void log_line(LogLevel lvl, const std::string& msg) {
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[qkd %s] %s\n", level_name(lvl), msg.c_str());
}

}  // namespace qkd
