#pragma once

#include <stdexcept>
#include <string>

namespace orderlens {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input that cannot be represented at all (bad header, bad line).
struct ParseError : Error {
    using Error::Error;
};

// Structurally parseable input that breaks a data-model invariant.
struct ValidationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}
