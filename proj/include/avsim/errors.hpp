#pragma once

#include <stdexcept>
#include <string>

namespace avsim {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's mathematical domain (negative time, NaN, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Equivalent-time continuation could not reach the requested degradation.
class ContinuationError : public Error {
 public:
  using Error::Error;
};

/// Waveform lifting found no effective voltage inside its bracket.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit failed (rank deficiency, too few samples).
class FitError : public Error {
 public:
  using Error::Error;
};

/// Invalid or incomplete run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed (e.g. a bisection bracket that should
/// straddle a crossing does not).
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace avsim
