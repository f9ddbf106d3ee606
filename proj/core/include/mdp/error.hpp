#pragma once

#include <stdexcept>
#include <string>

namespace mdp {

// Base of every error raised by the library. Subclasses map onto the CLI
// exit-code classes (config / io / validation) in tools/mdp.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents: bad magic, version or dtype.
class FormatError : public Error {
 public:
  using Error::Error;
};

// File payload shorter or longer than its header declares.
class LengthError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class PlacementError : public Error {
 public:
  using Error::Error;
};

}  // namespace mdp
