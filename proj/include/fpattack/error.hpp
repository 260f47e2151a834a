#pragma once

#include <stdexcept>
#include <string>

namespace fpattack {

// Bad parameters, malformed inputs, violated preconditions.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A configuration that is well-formed but not supported by the chosen
// estimator or construction (e.g. MaxZeros over an alphabet without 0).
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Estimation could not proceed, e.g. no exactly decoded rows.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ValidationError(msg);
}

}  // namespace fpattack
