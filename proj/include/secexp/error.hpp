#pragma once

#include <stdexcept>
#include <string>

namespace secexp {

// Bad shapes, out-of-range values, infeasible levels.
struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An enumeration or exact evaluation would exceed its size guard.
struct GuardError : std::length_error {
  using std::length_error::length_error;
};

// A constraint set that turned out to be empty at this blocklength.
struct EmptyFeasibleSet : std::domain_error {
  using std::domain_error::domain_error;
};

// Random codebook generation kept hitting a bad covering event.
struct PersistentEventError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

}  // namespace secexp
