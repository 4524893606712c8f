#pragma once

#include <stdexcept>
#include <string>

namespace pspan {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable files.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Inputs that violate a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An optimization could not be certified. `dump()` holds a replayable
/// plain-text form of the offending instance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::string dump)
      : Error(what), dump_(std::move(dump)) {}

  const std::string& dump() const noexcept { return dump_; }

 private:
  std::string dump_;
};

}  // namespace pspan
