#pragma once

#include <stdexcept>
#include <string>

namespace hspsim {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad input: malformed specs, invalid flags, violated preconditions.  CLI exit code 1.
struct UsageError : Error {
  using Error::Error;
};

// An exact identity or inequality that must hold did not.  CLI exit code 2.
struct InvariantError : Error {
  using Error::Error;
};

// Configured resource limit hit (dense amplitude cap, s escalation cap, order cap).
// CLI exit code 3.
struct CapError : Error {
  using Error::Error;
};

// Signals that the conditional matrix was too far from the identity for the
// requested bias vector; the caller rebuilds with a larger s.
struct EscalationNeeded : Error {
  using Error::Error;
};

}  // namespace hspsim
