#pragma once

#include <stdexcept>
#include <string>

namespace navmem {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text or file content (instructions, JSON payloads).
struct ParseError : Error {
    using Error::Error;
};

// Filesystem / stream failures.
struct IoError : Error {
    using Error::Error;
};

// Violated preconditions and domain constraints (invalid start pose,
// unreachable targets, infeasible scene configs, ...).
struct DomainError : Error {
    using Error::Error;
};

}  // namespace navmem
