#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace persuade {

/// Malformed instance, file, or parameter.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LookupError : public InputError {
public:
    using InputError::InputError;
};

/// A size cap (grid size, voter count, state count) was exceeded.
class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The LP backend failed to produce a trustworthy answer.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scheme violates an internal consistency condition (e.g. Bayes plausibility).
class InconsistencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_real(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

}  // namespace persuade
