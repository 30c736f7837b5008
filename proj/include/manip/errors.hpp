#pragma once

#include <stdexcept>
#include <string>

namespace manip {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Dimension or shape mismatch between operands.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

/// Value outside the admissible domain (non-symmetric, non-SPD, non-finite, ...).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Robot configuration where a required inverse does not exist.
class SingularConfigError : public Error {
public:
    explicit SingularConfigError(const std::string& msg) : Error(msg) {}
};

/// Iterative procedure failed to reach its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Not enough data to carry out an estimation.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

/// Malformed configuration or document.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure, annotated with the offending path.
class IoError : public Error {
public:
    IoError(const std::string& msg, const std::string& path)
        : Error(msg + ": " + path) {}
};

}  // namespace manip
