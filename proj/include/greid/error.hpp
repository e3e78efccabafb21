#pragma once

#include <stdexcept>
#include <string>

namespace greid {

enum class ErrorKind {
    validation,  // bad input data or configuration
    runtime,     // I/O and other environment failures
};

/// Exception carrying a stable machine-readable code such as "invalid-dataset".
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail, ErrorKind kind = ErrorKind::validation)
        : std::runtime_error(code + ": " + detail), code_(std::move(code)), kind_(kind) {}

    const std::string& code() const noexcept { return code_; }
    ErrorKind kind() const noexcept { return kind_; }

private:
    std::string code_;
    ErrorKind kind_;
};

}  // namespace greid
