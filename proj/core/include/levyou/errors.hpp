#pragma once

#include <stdexcept>
#include <string>

namespace levyou {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad argument values: non-finite entries, negative horizons, size mismatches.
class InvalidInput : public Error {
  public:
    using Error::Error;
};

/// A hypothesis required by an estimator does not hold for the supplied
/// model/noise. The message names the failed hypothesis.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// Rank(B) < n where a full-rank noise loading is required.
class RankDeficientError : public Error {
  public:
    using Error::Error;
};

/// Operation only implemented up to a dimension cap (histograms d<=3, ...).
class UnsupportedDimension : public Error {
  public:
    using Error::Error;
};

/// A supplied density callable returned a negative or otherwise unusable value.
class InvalidDensity : public Error {
  public:
    using Error::Error;
};

/// A condition the implementation guarantees internally was violated.
class InternalError : public Error {
  public:
    using Error::Error;
};

}  // namespace levyou
