#pragma once
// Minimal stderr logger. Level comes from the MAD_LOG env var
// (error|warn|info|debug), default warn.

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

namespace mad::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

inline Level threshold() {
    static const Level cached = [] {
        const char* env = std::getenv("MAD_LOG");
        if (!env) return Level::warn;
        const std::string v(env);
        if (v == "error") return Level::error;
        if (v == "info") return Level::info;
        if (v == "debug") return Level::debug;
        return Level::warn;
    }();
    return cached;
}

inline void emit(Level level, const std::string& msg) {
    if (level > threshold()) return;
    static std::mutex mu;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[mad:" << names[static_cast<int>(level)] << "] " << msg << "\n";
}

inline void error(const std::string& msg) { emit(Level::error, msg); }
inline void warn(const std::string& msg) { emit(Level::warn, msg); }
inline void info(const std::string& msg) { emit(Level::info, msg); }
inline void debug(const std::string& msg) { emit(Level::debug, msg); }

} // namespace mad::log
