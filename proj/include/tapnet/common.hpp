#pragma once

#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace tapnet {

// Every recoverable failure is thrown as an Error carrying a machine-readable
// kind string. The CLI maps kinds onto its error JSON; tests match on them.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

inline Error shape_error(const std::string& msg)          { return Error("shape", msg); }
inline Error spec_error(const std::string& msg)           { return Error("spec", msg); }
inline Error config_error(const std::string& msg)         { return Error("config", msg); }
inline Error format_error(const std::string& msg)         { return Error("format", msg); }
inline Error io_error(const std::string& msg)             { return Error("io", msg); }
inline Error labeling_error(const std::string& msg)       { return Error("labeling", msg); }
inline Error stratification_error(const std::string& msg) { return Error("stratification", msg); }
inline Error alignment_error(const std::string& msg)      { return Error("alignment", msg); }
inline Error batch_size_error(const std::string& msg)     { return Error("batch_size", msg); }
inline Error evaluation_error(const std::string& msg)     { return Error("evaluation", msg); }
inline Error training_error(const std::string& msg)       { return Error("training", msg); }
inline Error aggregation_error(const std::string& msg)    { return Error("aggregation", msg); }

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

namespace detail {
inline LogLevel parse_log_level() {
    const char* env = std::getenv("TAPNET_LOG");
    if (!env) return LogLevel::kWarn;
    std::string v(env);
    if (v == "error") return LogLevel::kError;
    if (v == "warn") return LogLevel::kWarn;
    if (v == "info") return LogLevel::kInfo;
    if (v == "debug") return LogLevel::kDebug;
    return LogLevel::kWarn;
}
} // namespace detail

inline LogLevel log_level() {
    static LogLevel level = detail::parse_log_level();
    return level;
}

inline void log_at(LogLevel level, const char* tag, const char* fmt, ...) {
    if (level > log_level()) return;
    std::fprintf(stderr, "[tapnet:%s] ", tag);
    va_list args;
    va_start(args, fmt);
    std::vfprintf(stderr, fmt, args);
    va_end(args);
    std::fputc('\n', stderr);
}

#define TAPNET_LOG_ERROR(...) ::tapnet::log_at(::tapnet::LogLevel::kError, "error", __VA_ARGS__)
#define TAPNET_LOG_WARN(...)  ::tapnet::log_at(::tapnet::LogLevel::kWarn, "warn", __VA_ARGS__)
#define TAPNET_LOG_INFO(...)  ::tapnet::log_at(::tapnet::LogLevel::kInfo, "info", __VA_ARGS__)
#define TAPNET_LOG_DEBUG(...) ::tapnet::log_at(::tapnet::LogLevel::kDebug, "debug", __VA_ARGS__)

constexpr const char* kVersion = "0.1.0";

} // namespace tapnet
