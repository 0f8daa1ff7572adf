#pragma once

#include <stdexcept>
#include <string>

namespace telesched {

/// Input rejected before any computation (bad rate, buffer, grid, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Queue has no steady state for the requested parameters (load >= 1 on an
/// unbounded buffer).
class StabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant was broken; always a bug.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

inline void ensure(bool ok, const std::string& what) {
  if (!ok) throw InvariantViolation(what);
}

}  // namespace detail
}  // namespace telesched
