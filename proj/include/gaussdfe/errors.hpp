#pragma once

#include <stdexcept>
#include <string>

namespace gaussdfe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NotHermitian : Error {
    using Error::Error;
};

struct NotPositiveSemidefinite : Error {
    using Error::Error;
};

// Raised when a Gram matrix that must be inverted (or whose entropy must be
// finite) has a zero innovations pivot.
struct SingularGram : Error {
    using Error::Error;
};

struct InvalidArgument : Error {
    using Error::Error;
};

} // namespace gaussdfe
