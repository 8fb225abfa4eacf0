#pragma once

#include <stdexcept>

namespace shotnoise {

// A mathematical precondition fails (divergent existence integral, invalid
// representation); the CLI maps this to exit code 3.
struct RefusedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerics did not converge to the requested tolerance; CLI exit code 4.
struct NonConvergedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace shotnoise
