#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace primerace {

// Error taxonomy shared by all modules.  The CLI maps these onto process
// exit codes: 0 ok, 2 usage, 3 I/O, 4 data validation, 5 inconclusive.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments or module preconditions violated by caller input.
struct InvalidArgumentError : Error {
    using Error::Error;
};

// Filesystem or stream failures.
struct IoError : Error {
    using Error::Error;
};

// Malformed or inconsistent input data (zero files, barrier specs, ...).
struct DataError : Error {
    using Error::Error;
};

// A streaming computation was aborted mid-run; carries how far it got.
struct PartialProgressError : Error {
    std::uint64_t last_completed_boundary;
    PartialProgressError(const std::string& what, std::uint64_t boundary)
        : Error(what), last_completed_boundary(boundary) {}
};

}  // namespace primerace
