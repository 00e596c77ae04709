#pragma once

#include <stdexcept>
#include <string>

namespace ewhi {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two vectors that must share a dimension do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation only implemented for some objective-space dimensions.
class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

/// Gaussian-process fitting failed (kernel matrix not factorizable).
class FitError : public Error {
 public:
  using Error::Error;
};

/// The sampling region for particle initialization is (nearly) empty.
class SmcInitError : public Error {
 public:
  using Error::Error;
};

/// Every incremental importance weight of an SMC stage vanished.
class DegenerateTargetError : public Error {
 public:
  using Error::Error;
};

/// A particle sits where the sampling density is zero.
class InconsistentSampleError : public Error {
 public:
  using Error::Error;
};

/// A black-box problem evaluation failed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace ewhi
