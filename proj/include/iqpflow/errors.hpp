#pragma once

#include <stdexcept>
#include <string>

namespace iqp {

/// Mismatched problem / parameter / state sizes.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A request exceeds a configured size cap (brute force, statevector, Pauli weight).
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input values (non-normalized distributions, bad sizes, bad files).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace iqp
