#pragma once

#include <stdexcept>
#include <string>

namespace ncup {

/// Malformed or mismatched input (shapes, dimensions, indices, files).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A documented precondition does not hold, e.g. a frame that should be Parseval is not.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class SingularOperatorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The frame operator of a family is not invertible, so the family does not span.
class NotAFrameError : public SingularOperatorError {
public:
    using SingularOperatorError::SingularOperatorError;
};

/// Randomized generation kept failing after its retry budget.
class EnvironmentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ncup
