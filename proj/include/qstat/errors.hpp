#pragma once

#include <stdexcept>
#include <string>

namespace qstat {

// Base class for all numerical failure modes so callers can catch one type.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDiagonal : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  NonConvergence(const std::string& msg, double last, double previous)
      : NumericalError(msg), last_iterate(last), previous_iterate(previous) {}
  double last_iterate;
  double previous_iterate;
};

class NoStationaryPoint : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TruncationInsufficient : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeriesOverflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SlowConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class TailUnbounded : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceTooFew : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class LogOfNonPositive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qstat
