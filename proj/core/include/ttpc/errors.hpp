#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ttpc {

/// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller misuse: bad flags, bad arguments, missing paths. Exit code 1.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Bad input data: malformed files, contract violations, incompatible
/// pipeline configurations. Exit code 2.
class DataError : public Error {
public:
    using Error::Error;
};

/// A pipeline configuration that can never work, e.g. multinomial naive
/// Bayes on embedding features that may be negative.
class IncompatibleConfigError : public DataError {
public:
    using DataError::DataError;
};

/// Malformed serialized input; carries the byte offset of the failure
/// when the underlying parser reports one.
class ParseError : public DataError {
public:
    ParseError(const std::string& what, std::size_t byte_offset)
        : DataError(what), byte_offset_(byte_offset) {}
    std::size_t byte_offset() const noexcept { return byte_offset_; }

private:
    std::size_t byte_offset_ = 0;
};

/// Bugs and broken invariants. Exit code 3.
class InternalError : public Error {
public:
    using Error::Error;
};

}  // namespace ttpc
