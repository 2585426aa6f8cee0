#pragma once

#include <stdexcept>
#include <string>

namespace mdmod {

/// Input violated a documented precondition (bad argument, malformed spec).
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A file could not be parsed; message names the offending line.
struct parse_error : std::runtime_error {
    parse_error(const std::string& path, int line, const std::string& what)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
          line_number(line) {}
    int line_number;
};

/// Numerical procedure failed to meet its convergence contract.
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace mdmod
