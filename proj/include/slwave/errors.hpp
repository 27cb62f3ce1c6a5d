#pragma once

#include <stdexcept>
#include <string>

namespace slwave {

/// Violated precondition: bad sizes, ranges, mismatched grids, malformed input.
struct parameter_error : std::invalid_argument {
    explicit parameter_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Numerical failure: overflow, ill conditioning, inconsistent data.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unreadable, unwritable or malformed files.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace slwave
