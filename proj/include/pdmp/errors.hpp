#ifndef PDMP_ERRORS_HPP
#define PDMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pdmp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A potential evaluator returned a non-finite value.
class InvalidPotential : public Error {
public:
    using Error::Error;
};

/// No finite rate envelope can be derived over the requested horizon.
class UnboundedCurvature : public Error {
public:
    using Error::Error;
};

/// Thinning found the true rate above its envelope: the potential's
/// envelope is broken.
class EnvelopeViolation : public Error {
public:
    using Error::Error;
};

/// Fewer than three points of a decay curve stand above the noise.
class InsufficientSignal : public Error {
public:
    using Error::Error;
};

class UnsupportedObservable : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace pdmp

#endif  // PDMP_ERRORS_HPP
