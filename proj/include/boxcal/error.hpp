#pragma once

#include <stdexcept>
#include <string>

namespace boxcal {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input file does not parse at all (bad JSON, wrong top-level shape).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Parsed, but a required field is missing or has the wrong type.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Field values violate a domain invariant (w <= 0, score > 1, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

// Calibration cell cannot be fitted (empty bin, too few samples, infeasible
// fold). Grid search treats this as an infeasible cell.
class InvalidCellError : public Error {
 public:
  using Error::Error;
};

class GenerationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace boxcal
