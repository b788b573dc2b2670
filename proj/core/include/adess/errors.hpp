#pragma once

#include <stdexcept>
#include <string>

namespace adess {

// Base class for every domain error raised by the library. The CLI maps these
// to exit status 1; anything else is treated as a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownBlock : public Error {
 public:
  using Error::Error;
};

class InvalidDifficulty : public Error {
 public:
  using Error::Error;
};

class InvalidTimestamp : public Error {
 public:
  using Error::Error;
};

class NotAnAncestor : public Error {
 public:
  using Error::Error;
};

class NotPenalized : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double lo, double hi)
      : Error(what + " (bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  [[nodiscard]] double bracket_lo() const noexcept { return lo_; }
  [[nodiscard]] double bracket_hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

// Raised when an internal invariant is broken (for example an empty eligible
// set during ADESS canonical selection). Not a recoverable domain error.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace adess
