#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace irt {

enum class ErrorCode {
  IndexOutOfRange,
  SelfLoop,
  NegativeRadius,
  LengthMismatch,
  NonBinaryAssignment,
  UnknownTreatment,
  TooFewClusters,
  EmptyCluster,
  SupportTooLarge,
  SameLabels,
  UnknownLabel,
  EmptyObserved,
  InvalidHyperparameter,
  DiscreteKind,
  ContinuousKind,
  OutOfSupport,
  DegenerateSample,
  UndefinedObservedStatistic,
  ResampleBudgetExceeded,
  TrueDensityZero,
  IndivisibleN,
  InvalidArgument,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the Python layer) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace irt
