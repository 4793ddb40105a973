#pragma once

#include <stdexcept>
#include <string>

namespace wflow {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user-supplied value (non-finite, non-positive units, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

// Request exceeds what the implementation supports (Hermite order, eta_max).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A closed form would leave double range.
class RangeError : public Error {
 public:
  using Error::Error;
};

// Caller broke a documented precondition (even order where odd is required,
// broken frequency constraint, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Closed-form path asked to handle a term it cannot factorize.
class UnsupportedTermError : public Error {
 public:
  using Error::Error;
};

// Sampling grid cannot hold the state (tail not contained, under-resolved).
class GridError : public Error {
 public:
  using Error::Error;
};

// Wigner transform marginals disagree: aliasing.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid configuration document.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace wflow
