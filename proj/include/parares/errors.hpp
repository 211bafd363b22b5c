// Error types shared across the library. Each failure mode callers are
// expected to handle gets its own type so they can be told apart.
#pragma once

#include <stdexcept>
#include <string>

namespace parares {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter outside its documented domain (negative temperature, odd level
// count, non-finite input, ...).
class InvalidParameterError : public Error {
 public:
  using Error::Error;
};

// Adaptive step-size control collapsed below the minimum step.
class IntegratorFailureError : public Error {
 public:
  using Error::Error;
};

// A spatial grid too small to hold the requested state.
class DomainTooSmallError : public Error {
 public:
  using Error::Error;
};

// Capture probability requested at a time where capture is not yet defined
// (before the first ladder crossing).
class UndefinedCaptureError : public Error {
 public:
  using Error::Error;
};

// The strongly-driven reference run used to calibrate the capture cutoff did
// not itself lock.
class CalibrationFailureError : public Error {
 public:
  using Error::Error;
};

// An S-curve did not bracket the 50% point well enough to fit a threshold.
// Carries a suggested drive range.
class NeedsWiderScanError : public Error {
 public:
  NeedsWiderScanError(const std::string& what, double suggested_lo, double suggested_hi)
      : Error(what), suggested_lo(suggested_lo), suggested_hi(suggested_hi) {}
  double suggested_lo;
  double suggested_hi;
};

}  // namespace parares
