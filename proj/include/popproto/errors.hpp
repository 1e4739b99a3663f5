#pragma once

#include <stdexcept>
#include <string>

namespace popproto {

/// A caller supplied an argument outside an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An analysis object was queried outside its domain (e.g. potentials while
/// a disoriented edge exists, or a ledger that lost its bijection).
class InstrumentationError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A protocol-level invariant failed at run time.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Not enough usable data to fit a scaling law.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace popproto
