#pragma once

#include <stdexcept>
#include <string>

namespace rkrfm {

/// Invalid arguments, shapes or configuration values.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values produced while evaluating the model or the fitted fields.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Least-squares backend failures (LAPACK info != 0, empty systems, zero rows).
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rkrfm
