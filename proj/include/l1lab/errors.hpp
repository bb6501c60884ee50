#pragma once

#include <stdexcept>
#include <string>

namespace l1lab {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text or JSON that could not be parsed.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Objects that do not fit together (dimension mismatch, mixed spaces).
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A value outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// An operator or scenario description that violates its own invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures (unreadable input, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace l1lab
