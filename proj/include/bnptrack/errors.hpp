#pragma once

#include <stdexcept>
#include <string>

namespace bnpt {

// Invalid parameter value (alpha <= 0, discount outside [0,1), ...).
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested size exceeds what an operation supports.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

// Vector/matrix dimensions do not agree.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation produced a non-finite or non-positive-definite result.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A structural invariant was violated (negative mass, inconsistent counts).
struct InvariantError : std::logic_error {
    using std::logic_error::logic_error;
};

// An input violates a documented precondition.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Bad experiment configuration. `field` names the offending JSON path.
struct ConfigError : std::runtime_error {
    ConfigError(std::string field_, const std::string& msg)
        : std::runtime_error(field_.empty() ? msg : field_ + ": " + msg), field(std::move(field_)) {}
    std::string field;
};

}  // namespace bnpt
