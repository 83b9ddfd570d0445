#pragma once

#include <stdexcept>
#include <string>

namespace histopush {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input: rejected data, out-of-range arguments. CLI exit code 1.
struct ValidationError : Error {
    using Error::Error;
};

// Filesystem trouble. CLI exit code 2.
struct IoError : Error {
    using Error::Error;
};

// Broken internal invariant. CLI exit code 3.
struct InternalError : Error {
    using Error::Error;
};

struct NonPositiveWeight : ValidationError { using ValidationError::ValidationError; };
struct BadNormalization : ValidationError { using ValidationError::ValidationError; };
struct ShapeMismatch : ValidationError { using ValidationError::ValidationError; };
struct IndexOutOfRange : ValidationError { using ValidationError::ValidationError; };
struct DomainError : ValidationError { using ValidationError::ValidationError; };
struct DimensionMismatch : ValidationError { using ValidationError::ValidationError; };
struct DepthTooSmall : ValidationError { using ValidationError::ValidationError; };
struct InputDimMismatch : ValidationError { using ValidationError::ValidationError; };
struct WidthTooSmall : ValidationError { using ValidationError::ValidationError; };
struct EmptyList : ValidationError { using ValidationError::ValidationError; };
struct ParseError : ValidationError { using ValidationError::ValidationError; };
struct TooLarge : ValidationError { using ValidationError::ValidationError; };
struct InfeasibleMass : ValidationError { using ValidationError::ValidationError; };
struct NotConverged : Error { using Error::Error; };

}  // namespace histopush
