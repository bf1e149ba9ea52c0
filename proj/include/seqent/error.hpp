#pragma once

#include <stdexcept>
#include <string>

namespace seqent {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument does not hold (bad alphabet, reducible chain, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A coordinate outside the evaluable range of a sampled point was requested.
class WindowExceeded : public Error {
 public:
  using Error::Error;
};

/// A combinatorial cap (join length, assignment count, subset size) was exceeded.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// The requested computation is degenerate, e.g. a zero-measure cell or an empty set.
class Degenerate : public Error {
 public:
  using Error::Error;
};

/// A configuration file is malformed. The message names the offending field.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace seqent
