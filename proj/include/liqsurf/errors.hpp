#pragma once

#include <stdexcept>
#include <string>

namespace liqsurf {

/// Base for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition of an operation.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// File could not be read, decoded or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Detector configuration could not be resolved.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace liqsurf
