#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace switchbound {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument, configuration value or precondition violation.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed expression source; `offset()` is the byte offset of the fault.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside a function's domain, division by zero, or overflow.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Argument outside the range on which an inverse is defined.
class OutOfRangeError : public Error {
public:
    using Error::Error;
};

/// ODE integration failure; carries the time at which the state blew up.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, double time)
        : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
    [[nodiscard]] double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace switchbound
