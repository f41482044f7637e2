#pragma once

#include <stdexcept>
#include <string>

namespace onionlab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A volume-type quantity was requested from a hull that is not full-dimensional.
class DegenerateHull : public Error {
 public:
  using Error::Error;
};

/// A point lies on the segment [0, -e_d] where the rescaling map is undefined.
class PolePoint : public Error {
 public:
  using Error::Error;
};

class UnknownId : public Error {
 public:
  using Error::Error;
};

class GeneralPositionViolated : public Error {
 public:
  using Error::Error;
};

class WindowTooSmall : public Error {
 public:
  using Error::Error;
};

/// Parse failure in a CSV/JSON/TOML input; the message names the offending line or key.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace onionlab
