#pragma once

#include <stdexcept>
#include <string>

namespace haad {

// Every library error derives from Error so the CLI can map categories to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad shapes or out-of-range arguments passed to a library call.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A caller violated an operation precondition (empty support set, zero-norm embedding, ...).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid user configuration (corpus spec, training config, sweep grid).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A checkpoint does not match the data or another checkpoint it is combined with.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace haad
