#pragma once

#include <stdexcept>
#include <string>

namespace invc {

// Error hierarchy shared by all modules. Every error carries a message
// stating which requirement failed.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct BadWav : Error {
    using Error::Error;
};

struct TooShort : Error {
    using Error::Error;
};

struct BadMagic : Error {
    using Error::Error;
};

struct BadVersion : Error {
    using Error::Error;
};

struct TruncatedFile : Error {
    using Error::Error;
};

struct ShapeMismatch : Error {
    using Error::Error;
};

struct ZeroDenominator : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace invc
