#pragma once

#include <stdexcept>
#include <string>

namespace recmem {

// Base class for all toolkit failures. Subclasses correspond to the
// distinct CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: missing paths, invalid flag combinations, out-of-range
// hyperparameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input data: dataset lines, model responses with no parseable list.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Network-level failure after retries are exhausted.
class TransportError : public Error {
 public:
  using Error::Error;
};

// The endpoint answered, but not in the expected shape.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Replay backend queried for a key that is not in the cache. Distinguished
// from TransportError so callers can tell a stale fixture from a dead host.
class CacheMissError : public Error {
 public:
  using Error::Error;
};

// Cache file could not be written.
class StorageError : public Error {
 public:
  using Error::Error;
};

// Numerical failure: diverged training loss, singular solve.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace recmem
