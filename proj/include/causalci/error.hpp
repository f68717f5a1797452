#pragma once

#include <stdexcept>
#include <string>

namespace causalci {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input data has fewer rows than the covariance computation needs.
struct TooFewRows : Error {
    using Error::Error;
};

// Sample covariance failed the positive-definiteness guard.
struct SingularCovariance : Error {
    using Error::Error;
};

// A candidate covariance matrix is not positive definite.
struct NotPositiveDefinite : Error {
    using Error::Error;
};

// One of the two halves of a data split yields a degenerate covariance.
struct DegenerateSplit : Error {
    using Error::Error;
};

// Malformed numeric text input; message carries the 1-based line number.
struct ParseError : Error {
    explicit ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg), line_number(line) {}
    long line_number;
};

// Columns of a pair file do not have equal lengths.
struct LengthMismatch : Error {
    using Error::Error;
};

// Invalid experiment or CLI configuration.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace causalci
