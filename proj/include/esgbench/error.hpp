#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace esgbench {

/// Error category. Each maps to a process exit code of the CLI.
enum class ErrorKind {
    validation,  // bad configuration or arguments
    data,        // input data cannot be processed
    transport,   // LLM endpoint unreachable or failing
};

[[nodiscard]] constexpr int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation: return 1;
        case ErrorKind::data: return 2;
        case ErrorKind::transport: return 3;
    }
    return 2;
}

/// Base exception of the library. `stage` is filled in by the pipeline
/// when the error propagates out of a named stage.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }

    void set_stage(std::string stage) { stage_ = std::move(stage); }

private:
    ErrorKind kind_;
    std::string stage_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& message)
        : Error(ErrorKind::validation, message) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error(ErrorKind::data, message) {}
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& message)
        : Error(ErrorKind::transport, message) {}
};

}  // namespace esgbench
