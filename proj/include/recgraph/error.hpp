#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace recgraph {

/// Broad failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory { config, io, provider, analysis };

inline std::string_view to_string(ErrorCategory category) noexcept {
    switch (category) {
        case ErrorCategory::config: return "config";
        case ErrorCategory::io: return "io";
        case ErrorCategory::provider: return "provider";
        case ErrorCategory::analysis: return "analysis";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class FormatError : public Error {
public:
    explicit FormatError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

class ProviderError : public Error {
public:
    explicit ProviderError(const std::string& what) : Error(ErrorCategory::provider, what) {}
};

class AnalysisError : public Error {
public:
    explicit AnalysisError(const std::string& what) : Error(ErrorCategory::analysis, what) {}
};

} // namespace recgraph
