#pragma once

#include <stdexcept>
#include <string>

namespace hjfb {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument value was violated.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Operands of incompatible dimension were combined.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A point was queried outside the domain a field is defined on.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// An iterate became NaN or infinite.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

}  // namespace hjfb
