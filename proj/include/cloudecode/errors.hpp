#pragma once

#include <stdexcept>
#include <string>

namespace cloudecode {

// Categories map onto the CLI exit codes: io=1, config=2, processing=3.
enum class ErrorCategory { io = 1, config = 2, processing = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, std::string message)
        : std::runtime_error(std::move(message)), category_(category) {}

    ErrorCategory category() const noexcept { return category_; }

    const char* category_name() const noexcept {
        switch (category_) {
            case ErrorCategory::io: return "io";
            case ErrorCategory::config: return "config";
            case ErrorCategory::processing: return "processing";
        }
        return "unknown";
    }

private:
    ErrorCategory category_;
};

class IoError : public Error {
public:
    explicit IoError(std::string message) : Error(ErrorCategory::io, std::move(message)) {}
};

// Bad configuration or invalid caller-supplied values.
class ConfigError : public Error {
public:
    explicit ConfigError(std::string message) : Error(ErrorCategory::config, std::move(message)) {}
};

// Unparseable input data (a malformed PNG, a broken JSON document).
class DecodeError : public Error {
public:
    explicit DecodeError(std::string message) : Error(ErrorCategory::processing, std::move(message)) {}
};

// The synthesizer could not place a word inside the canvas.
class LayoutError : public Error {
public:
    explicit LayoutError(std::string message) : Error(ErrorCategory::processing, std::move(message)) {}
};

}  // namespace cloudecode
