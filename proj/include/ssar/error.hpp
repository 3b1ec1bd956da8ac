#pragma once

#include <stdexcept>
#include <string>

namespace ssar {

// Base class for every error raised by the library. Precondition violations on
// plain arguments (shape mismatches, out-of-range values) use
// std::invalid_argument instead.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Missing, unreadable or malformed input files.
class InputError : public Error {
public:
    using Error::Error;
};

// Experiment configuration failed schema validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A training objective became non-finite.
class DivergenceError : public Error {
public:
    using Error::Error;
};

}  // namespace ssar
