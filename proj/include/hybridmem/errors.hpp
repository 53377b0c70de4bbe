#pragma once

#include <stdexcept>
#include <string>

namespace hybridmem {

// Invalid user-supplied parameters or config documents. CLI exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical invariant failed mid-computation (hermiticity defect, trace
// drift, non-finite value). CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failures while emitting results. CLI exit code 4.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace hybridmem
