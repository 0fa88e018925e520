#pragma once

#include <stdexcept>
#include <string>

namespace xaif {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: unknown key, missing column, malformed value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Out-of-domain numeric parameter (p outside (0,1), k == 0, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Unusable input data: degenerate label set, empty document, missing file.
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed model or embedding file.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

// A classifier violated the probability-vector contract.
class InterfaceError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

}  // namespace xaif
