#pragma once

#include <stdexcept>
#include <string>

namespace tubalkit {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised for bad shapes or invalid arguments.
class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// Numerical failures map to CLI exit code 3.
class NumericalError : public Error {
public:
    using Error::Error;
};

class SymmetryViolation : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SizeGuard : public Error {
public:
    using Error::Error;
};

class RankOutOfRange : public Error {
public:
    using Error::Error;
};

class NegativeRadius : public Error {
public:
    using Error::Error;
};

class InsufficientSpectrum : public Error {
public:
    using Error::Error;
};

class InfeasibleStart : public Error {
public:
    using Error::Error;
};

class InfeasiblePoint : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace tubalkit
