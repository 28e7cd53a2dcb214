#include "synthforge/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace synthforge {

static LogLevel parse_level() {
    const char* env = std::getenv("SYNTHFORGE_LOG");
    if (!env) return LogLevel::Info;
    if (std::strcmp(env, "error") == 0) return LogLevel::Error;
    if (std::strcmp(env, "warn") == 0) return LogLevel::Warn;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    return LogLevel::Info;
}

LogLevel log_level() {
    static const LogLevel level = parse_level();
    return level;
}

void log_message(LogLevel level, const std::string& msg) {
    if (level > log_level()) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    // single fprintf keeps lines whole under concurrent workers
    std::fprintf(stderr, "[synthforge %s] %s\n", names[static_cast<int>(level)], msg.c_str());
}

}  // namespace synthforge
