#pragma once

#include <stdexcept>
#include <string>

namespace lc {

// Bad arguments, shape mismatches, invalid configuration. CLI exit code 2.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values or a numeric procedure that failed. CLI exit code 3.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File format, truncation, filesystem failures. CLI exit code 4.
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace lc
