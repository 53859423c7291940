#pragma once

#include <stdexcept>
#include <string>

namespace herald {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input: bad parameters, malformed configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A requested constraint (target heralding efficiency, H floor) cannot be met.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

/// Eigensolver failure, loss of positivity, or a binding mode cap.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// An output file could not be written.
class OutputError : public Error {
public:
    using Error::Error;
};

} // namespace herald
