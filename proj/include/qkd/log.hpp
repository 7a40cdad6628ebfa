#pragma once

#include <sstream>
#include <string>

namespace qkd {

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3, Off = 4 };

// Level comes from the QKD_LOG_LEVEL environment variable
// (debug|info|warn|error|off); default is warn.
LogLevel log_level();
void set_log_level(LogLevel lvl);
void log_line(LogLevel lvl, const std::string& msg);

namespace detail {
template <typename... Args>
std::string cat(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    return os.str();
}
}  // namespace detail

template <typename... Args>
void log_debug(Args&&... args) {
    if (log_level() <= LogLevel::Debug) log_line(LogLevel::Debug, detail::cat(args...));
}
template <typename... Args>
void log_info(Args&&... args) {
    if (log_level() <= LogLevel::Info) log_line(LogLevel::Info, detail::cat(args...));
}
template <typename... Args>
void log_warn(Args&&... args) {
    if (log_level() <= LogLevel::Warn) log_line(LogLevel::Warn, detail::cat(args...));
}
template <typename... Args>
void log_error(Args&&... args) {
    if (log_level() <= LogLevel::Error) log_line(LogLevel::Error, detail::cat(args...));
}

}  // namespace qkd
