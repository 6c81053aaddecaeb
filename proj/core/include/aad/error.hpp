#pragma once

#include <stdexcept>
#include <string>

namespace aad {

// Base class for every data/validation failure raised by the library. The CLI
// maps anything derived from this to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidBand : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Normal equations could not be factorized. Carries the smallest pivot seen.
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& what, double smallest_pivot);
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

class UndefinedCorrelation : public Error {
 public:
  using Error::Error;
};

class DegenerateVariance : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace aad
