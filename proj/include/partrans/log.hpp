#pragma once

#include <atomic>
#include <iostream>
#include <mutex>
#include <string_view>

namespace partrans {

enum class LogLevel { quiet = 0, warn = 1, info = 2 };

inline std::atomic<int>& log_level_ref() {
  static std::atomic<int> level{static_cast<int>(LogLevel::warn)};
  return level;
}

inline void set_log_level(LogLevel l) { log_level_ref() = static_cast<int>(l); }

inline void log_message(LogLevel l, std::string_view tag, std::string_view msg) {
  if (static_cast<int>(l) > log_level_ref().load()) return;
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << '[' << tag << "] " << msg << '\n';
}

inline void log_warn(std::string_view msg) { log_message(LogLevel::warn, "warn", msg); }
inline void log_info(std::string_view msg) { log_message(LogLevel::info, "info", msg); }

}  // namespace partrans
