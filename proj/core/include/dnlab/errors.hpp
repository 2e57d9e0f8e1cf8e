#pragma once

#include <stdexcept>
#include <string>

namespace dnlab {

/// Malformed input: wrong sizes, non-finite samples, unparseable specs.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold for the given data
/// (e.g. overlapping arcs where disjoint ones are required).
class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The numerics failed: step-size underflow, eigenvalue hit, solver breakdown.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dnlab
