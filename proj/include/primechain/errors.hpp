#pragma once

#include <stdexcept>
#include <string>

namespace primechain {

/// Base class for all library errors.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (decimal literals, rule specs, chain files).
class parse_error : public error {
 public:
  using error::error;
};

/// Precondition violation on a mathematical domain (non-positive base, zero exponent, ...).
class domain_error : public error {
 public:
  using error::error;
};

/// The requested result cannot be decided at any precision the caller allows.
class precision_error : public error {
 public:
  using error::error;
};

/// A configured resource guard tripped (exponent overflow, tower too deep).
class resource_error : public error {
 public:
  using error::error;
};

/// A backward recovery produced an empty constraint set: the chain is not
/// realizable by any seed.
class empty_intersection_error : public error {
 public:
  using error::error;
};

/// A value sits exactly on a rounding boundary (k + 1/2). The rounding
/// convention for this case is undefined, so it is surfaced instead of guessed.
class tie_error : public error {
 public:
  using error::error;
};

}  // namespace primechain
