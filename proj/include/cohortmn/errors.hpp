#pragma once

#include <stdexcept>
#include <string>

namespace cohortmn {

/// Base class of every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input text could not be read as the expected format (model files,
/// counts, priors, path records). Distinct from semantic validation.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Matrix or vector shape does not match the state space.
class BadDimension : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An explicit transition row fails the sum-to-one check, or an entry
/// is not a probability.
class NotStochastic : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Off-diagonal entries of a row with an implied diagonal sum past one.
class NegativeResidual : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The schedule is shorter than the requested horizon and does not hold
/// its last matrix.
class HorizonExceedsSchedule : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// An occupancy indicator is not a unit vector.
class BadIndicator : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// State counts do not sum to the cohort size.
class CountMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Transition tallies were requested for a time-varying schedule, which
/// would pool observations from different parameters.
class TimeVaryingUnsupported : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Two objects that must share a shape do not (e.g. prior vs counts).
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Fewer than two replications were requested.
class InsufficientReplications : public Error {
 public:
  using Error::Error;
};

/// Filesystem failure while reading or writing an artifact.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace cohortmn
