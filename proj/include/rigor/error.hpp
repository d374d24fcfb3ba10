#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rigor {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidEndpoints : public Error {
public:
    using Error::Error;
};

// An endpoint left the finite binary64 range (or a Rat value grew past the
// supported magnitude for elementary functions).
class Overflow : public Error {
public:
    using Error::Error;
};

// Argument outside the domain of an operation (log of a nonpositive interval,
// division by an interval containing zero, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

class DivisionByZeroInterval : public DomainError {
public:
    DivisionByZeroInterval() : DomainError("division by an interval containing zero") {}
};

class NotBisectable : public Error {
public:
    using Error::Error;
};

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnknownIdentifier : public SyntaxError {
public:
    using SyntaxError::SyntaxError;
};

class NonDifferentiable : public Error {
public:
    using Error::Error;
};

class SingularDerivative : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class EmptyCovering : public Error {
public:
    using Error::Error;
};

}  // namespace rigor
