/// @file errors.hpp
/// @brief Exception taxonomy mirroring the CLI exit-code contract.

#pragma once

#include <stdexcept>
#include <string>

namespace horizon {

/// Malformed or inconsistent user input (files, options, schemas). Exit code 3.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numerical failure (solver non-convergence, step underflow, ...). Exit code 4.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A verification flag failed (positivity, mass bound, ...). Exit code 2.
struct verify_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace horizon
