#pragma once

#include <stdexcept>
#include <string>

namespace bnls {

/// Base class of every error raised by the library. The CLI maps the
/// concrete type onto an exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shape mismatch between a field and its grid, or between two grids.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (lambda <= 0, R <= 0, zero field).
class DomainError : public Error {
public:
    using Error::Error;
};

/// NaN or Inf detected in a field.
class PoisonedStateError : public Error {
public:
    using Error::Error;
};

/// Caller broke a documented precondition (e.g. Q(u) > 0 for find_lambda0).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Parameters outside the regime an operation is valid for.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// The fixed-point iteration collapsed onto the trivial solution.
class DegenerateFixedPointError : public Error {
public:
    using Error::Error;
};

/// Invalid user configuration (unknown key, missing key, violated hypothesis).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Malformed snapshot or serialized input.
class FormatError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bnls
