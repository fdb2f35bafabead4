#pragma once

#include <stdexcept>
#include <string>

namespace solarcast {

// Error taxonomy maps onto CLI exit codes: config 2, data 3, numerical 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments to library calls (dimension mismatches, out-of-range levels).
struct ArgumentError : std::invalid_argument {
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace solarcast
