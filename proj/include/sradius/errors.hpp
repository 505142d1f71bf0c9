#pragma once

#include <stdexcept>
#include <string>

namespace sradius {

/// Raised when a linear-algebra kernel (SVD, eigen-solver, Cholesky) cannot
/// produce a usable result, e.g. on non-finite input.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an algorithm's documented precondition does not hold
/// (e.g. the stability radius of an already unstable matrix).
class PreconditionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sradius
