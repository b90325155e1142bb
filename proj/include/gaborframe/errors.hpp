#pragma once

#include <stdexcept>
#include <string>

namespace gabor {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on the inputs does not hold (dimension mismatch, singular
/// generator, wrong parity, non-integer redundancy, malformed file...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An enumeration or grid would exceed the configured point cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// A truncated sum, quadrature or refinement did not reach its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Odd vol^{-1/d}: the Laurent phase factor alternates and the Janssen
/// route is not available.
class AlternatingPhaseError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

} // namespace gabor
