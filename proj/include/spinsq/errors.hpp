#pragma once

#include <stdexcept>
#include <string>

namespace spinsq {

/// Bad input: malformed operator, out-of-range site index, invalid spec.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Moments that no quantum state can produce (Tr C above N(N+2)/4).
class InconsistentMomentsError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Hilbert-space dimension above the configured qubit cap.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace spinsq
