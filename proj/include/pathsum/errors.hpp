#pragma once

#include <stdexcept>

namespace pathsum {

// Bad user input: malformed files, malformed expressions, out-of-range indices.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failure at run time: domain errors, non-finite values, pivot breakdown.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pathsum
