#pragma once

#include <stdexcept>
#include <string>

namespace endo {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller supplied something outside an operation's preconditions.
class InputError : public Error {
public:
    using Error::Error;
};

/// An iteration failed to converge or a computed result missed its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A flow field returned a non-unit vector (or was otherwise unusable).
class FieldError : public InputError {
public:
    using InputError::InputError;
};

} // namespace endo
