#ifndef FANOVA_ERRORS_HPP
#define FANOVA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fanova {

// Error taxonomy mirrors the process exit codes: usage 1, data 2, internal 3.

/// Bad request: invalid flags, parameters out of range, incompatible options.
struct usage_error : std::runtime_error {
    explicit usage_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad input data: malformed files, schema mismatches, incomplete designs.
struct data_error : std::runtime_error {
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Violated internal invariant; indicates a bug, not a user mistake.
struct internal_error : std::runtime_error {
    explicit internal_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fanova

#endif
