#pragma once

#include <stdexcept>
#include <string>

namespace cegof {

/// Bad user-supplied data or configuration (maps to CLI exit code 2).
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid or degenerate model parameters.
class parameter_error : public std::runtime_error {
public:
    explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A numerical estimation step failed (maps to CLI exit code 3).
class estimation_error : public std::runtime_error {
public:
    explicit estimation_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File read/write failure (maps to CLI exit code 4).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace cegof
