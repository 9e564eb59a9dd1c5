#pragma once

#include <stdexcept>
#include <string>

namespace boolperc {

/// Argument outside an operation's domain (wrong dimension, bad radius,
/// intensity above the sampled maximum, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation exists but is not defined for the requested space/window pair.
class UnsupportedOperation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Requested sample would not fit in memory in practice.
class ResourceLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural guarantee of the model failed; always a bug.
class InternalInvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Base for estimator outcomes that the caller must act on (the CLI maps
/// these to exit status 2).
class EstimatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The probability sweep never crosses the requested threshold. `table`
/// carries the sweep as CSV so the caller can see where it went wrong.
class BracketingFailure : public EstimatorError {
 public:
  BracketingFailure(const std::string& what, std::string table)
      : EstimatorError(what), table_(std::move(table)) {}
  const std::string& table() const noexcept { return table_; }

 private:
  std::string table_;
};

/// No spanning cluster exists at the reference intensity, so the giant
/// cluster proxy is undefined.
class UndefinedGiant : public EstimatorError {
 public:
  using EstimatorError::EstimatorError;
};

}  // namespace boolperc
