#pragma once

#include <stdexcept>
#include <string>

namespace lossforge {

// Failure class decides the CLI exit code: bad inputs exit 1, numerical
// breakdowns (non-convergence, degeneracy, nonphysical results) exit 2.
enum class ErrorKind { Validation, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

[[noreturn]] inline void fail_validation(std::string code, const std::string& message) {
    throw Error(ErrorKind::Validation, std::move(code), message);
}

[[noreturn]] inline void fail_numerical(std::string code, const std::string& message) {
    throw Error(ErrorKind::Numerical, std::move(code), message);
}

} // namespace lossforge
