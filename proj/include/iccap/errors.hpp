// SPDX-License-Identifier: Apache-2.0
#ifndef ICCAP_ERRORS_HPP
#define ICCAP_ERRORS_HPP

#include <stdexcept>

namespace iccap {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shapes of the inputs are inconsistent (non-square, mismatched dims).
struct DimensionMismatch : Error {
  using Error::Error;
};

// A matrix required to be positive definite is not.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// A direct-channel matrix (H1 or H4) is numerically singular.
struct SingularChannel : Error {
  using Error::Error;
};

// The Riccati existence condition fails, no positive solution exists.
struct NotSolvable : Error {
  using Error::Error;
};

// An iteration failed to reach its residual target.
struct NoConvergence : Error {
  using Error::Error;
};

// An operation requires a regime the channel is not in.
struct WrongRegime : Error {
  using Error::Error;
};

// An operation requires a diagonal (parallel) channel.
struct NotParallel : Error {
  using Error::Error;
};

// Restarts of a concave solve disagreed beyond tolerance; indicates an
// implementation bug rather than a property of the channel.
struct NonConcaveAgreementFailure : Error {
  using Error::Error;
};

// A channel specification file could not be parsed.
struct ParseError : Error {
  using Error::Error;
};

}  // namespace iccap

#endif  // ICCAP_ERRORS_HPP
