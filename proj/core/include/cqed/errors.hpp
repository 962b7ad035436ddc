#pragma once

#include <stdexcept>
#include <string>

namespace cqed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed (singular system, truncation not converged, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed or unreadable configuration / input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace cqed
