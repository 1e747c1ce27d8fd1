#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qwalk {

// Every failure raised by the library derives from Error, so callers that
// only care about "something went wrong" can catch a single type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated. `field()` names the argument.
class PreconditionError : public Error {
 public:
  PreconditionError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// The defect coin has a zero entry, so {P0, Q0, R0, S0} is not a basis.
class SingularBasis : public Error {
 public:
  using Error::Error;
};

// Path enumeration was asked for more steps than its configured limit.
class TooLarge : public Error {
 public:
  using Error::Error;
};

// A generating function was evaluated on (or numerically at) a pole.
class PoleHit : public Error {
 public:
  using Error::Error;
};

// A square-root branch cannot be chosen pointwise (unit circle without an
// approach direction).
class BranchAmbiguity : public Error {
 public:
  using Error::Error;
};

// A closed form that needs det(U0) == det(U) was called on a walk that does
// not satisfy it.
class DeterminantMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace qwalk
