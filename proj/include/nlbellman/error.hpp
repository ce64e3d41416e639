#pragma once

#include <stdexcept>
#include <string>

namespace nlb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed configuration, violated preconditions, unsupported tags.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical evaluation could not be carried out at the requested point.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Assembly produced a stencil that violates the discrete maximum principle.
class MonotonicityError : public Error {
public:
    using Error::Error;
};

}  // namespace nlb
