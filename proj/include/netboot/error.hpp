#pragma once

#include <stdexcept>
#include <string>

namespace netboot {

// Bad input files or metadata. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure that invalidates a whole run (exit code 3).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Contract violation by the caller: bad parameters, out-of-range indices.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace netboot
