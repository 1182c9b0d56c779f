// errors.hpp - exception hierarchy shared by all relax modules
#pragma once

#include <stdexcept>
#include <string>

namespace relax {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by an argument (sizes, blocks, time steps).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Matrix is not a valid quantum state beyond roundoff tolerance.
class StateValidityError : public Error {
public:
    using Error::Error;
};

/// Requested problem does not fit the dense storage guard.
class ResourceError : public Error {
public:
    using Error::Error;
};

class NoSolutionError : public Error {
public:
    using Error::Error;
};

class UnsupportedMetricError : public Error {
public:
    using Error::Error;
};

/// Experiment configuration is incomplete or inconsistent.
class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace relax
