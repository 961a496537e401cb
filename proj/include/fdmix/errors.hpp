#pragma once

#include <stdexcept>
#include <string>

namespace fdmix {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class NonPositiveDistance : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

/// Raised by the quadrature layer; the message names the integral that failed.
class NumericalError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonFiniteIntegrand : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// A direction was requested for a mix in which no cell serves it.
class DegenerateMix : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

class EmptyDrop : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace fdmix
