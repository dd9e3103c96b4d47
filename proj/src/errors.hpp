#pragma once

#include <stdexcept>
#include <string>

namespace sdtgcn {

// Error taxonomy, mapped to CLI exit codes: InputError -> 2,
// DatasetTooSmallError -> 3, NumericError -> 4, everything else -> 1.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : Error {
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

struct InputError : Error {
    explicit InputError(const std::string& msg) : Error(msg) {}
};

struct DatasetTooSmallError : Error {
    explicit DatasetTooSmallError(const std::string& msg) : Error(msg) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace sdtgcn
