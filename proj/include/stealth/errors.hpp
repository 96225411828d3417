#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stealth {

// Input problems: malformed files, invalid grids, unreachable configuration.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failures: indefinite matrices, failed factorizations.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SyntaxError : public InputError {
public:
    SyntaxError(std::size_t line, const std::string& what)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ValidationError : public InputError {
public:
    using InputError::InputError;
};

class EmptyGridError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DisconnectedGridError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class CapExceededError : public InputError {
public:
    using InputError::InputError;
};

class UnreachableAlphaError : public InputError {
public:
    using InputError::InputError;
};

class NotPSDError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace stealth
