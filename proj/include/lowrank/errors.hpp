#pragma once

#include <stdexcept>
#include <string>

namespace lowrank {

/// Shapes or lengths that do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Out-of-range scalar arguments (ranks, penalties, tolerances).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The regressor Phi is not of full column rank.
class RegressorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid experiment or CLI configuration.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (non-convergence, non-finite values).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Gram matrix of active covariates is singular or too badly conditioned.
class IllConditionedError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Every candidate of a dictionary search was degenerate or excluded.
class SearchFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Reading or writing a file failed, or its contents could not be parsed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lowrank
