#ifndef CRSLEARN_ERRORS_HPP
#define CRSLEARN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace crslearn {

/// Bad configuration (widths, flags, hyperparameters). CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad input data (CSV parse, missing values, schema mismatch). CLI exit code 3.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numeric failure during training (non-finite loss). CLI exit code 4.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Operand shape mismatch. Programming error at call sites.
struct DimensionError : std::logic_error {
    explicit DimensionError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace crslearn

#endif
