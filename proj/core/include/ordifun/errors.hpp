#pragma once

#include <stdexcept>
#include <string>

namespace ordifun {

/// Base error carrying a short machine-readable code next to the message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

/// Invalid inputs, configuration or files. CLI maps this to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Conditioning or convergence failure. CLI maps this to exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace ordifun
