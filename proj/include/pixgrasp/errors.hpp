#pragma once

#include <stdexcept>
#include <string>

namespace pixgrasp {

/// Bad input: out-of-range parameters, malformed files, contract violations.
/// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failures. The CLI maps this to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDepthError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyMaskError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Every masked pixel has quality 0, so there is nothing worth grasping.
class NoViablePixelError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace pixgrasp
