#pragma once

#include <stdexcept>
#include <string>

namespace taxai {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration: parameters, distributions, bounds, file contents.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Post-tax resources of a household are negative.
class BankruptcyError : public Error {
 public:
  using Error::Error;
};

/// Factor prices are undefined because capital or labor is zero.
class DegenerateMarketError : public Error {
 public:
  using Error::Error;
};

/// Deposits net of government debt cannot fund a positive capital stock.
class CapitalExhaustedError : public Error {
 public:
  using Error::Error;
};

class DivisionByZeroError : public Error {
 public:
  using Error::Error;
};

/// Operation not permitted in the current object state (e.g. step after done).
class IllegalStateError : public Error {
 public:
  using Error::Error;
};

/// Container sizes or shapes do not match.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Bisection could not bracket the calibration target.
class NoBracketError : public Error {
 public:
  using Error::Error;
};

class NonFiniteGradientError : public Error {
 public:
  using Error::Error;
};

}  // namespace taxai
