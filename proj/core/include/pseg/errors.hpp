#pragma once

#include <stdexcept>
#include <string>

namespace pseg {

/// Thrown when a caller violates an operation's preconditions
/// (shape mismatch, out-of-range argument, invalid configuration).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown for malformed or inconsistent external data (files, schemas).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an optimizer produces a non-finite objective.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void require(bool ok, const std::string& what) {
  if (!ok) throw ContractError(what);
}
}  // namespace detail

}  // namespace pseg
