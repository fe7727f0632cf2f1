#pragma once

#include <stdexcept>
#include <string>

namespace rfem {

// Invalid user input (bad sizes, unknown options, mixed spaces) is reported
// with std::invalid_argument / std::out_of_range.  The types below cover the
// remaining failure classes so callers can tell them apart.

/// A cell map is degenerate (zero or near-zero Jacobian determinant).
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

/// A linear system or factorization is singular to working precision.
struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solver ran out of iterations before reaching its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// A cross-structure consistency check failed; indicates a bug, not bad input.
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace rfem
