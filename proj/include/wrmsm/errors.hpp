#pragma once

#include <stdexcept>
#include <string>

namespace wrmsm {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { config = 2, data = 3, degenerate = 4 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

/// Invalid parameters, unsupported options, violated preconditions.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Argument outside the mathematical domain of an operation (H outside (0,1),
/// eps <= 0, singular mixing matrix...). Reported as a configuration problem.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(ErrorKind::config, what) {}
};

/// Malformed or unusable input data.
class DataError : public Error {
public:
    explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// Non-positive eigenvalues, rank deficiency, failed factorizations.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(ErrorKind::degenerate, what) {}
};

}  // namespace wrmsm
