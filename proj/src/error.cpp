#include "irt/error.hpp"

namespace irt {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::NegativeRadius: return "NegativeRadius";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonBinaryAssignment: return "NonBinaryAssignment";
    case ErrorCode::UnknownTreatment: return "UnknownTreatment";
    case ErrorCode::TooFewClusters: return "TooFewClusters";
    case ErrorCode::EmptyCluster: return "EmptyCluster";
    case ErrorCode::SupportTooLarge: return "SupportTooLarge";
    case ErrorCode::SameLabels: return "SameLabels";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::EmptyObserved: return "EmptyObserved";
    case ErrorCode::InvalidHyperparameter: return "InvalidHyperparameter";
    case ErrorCode::DiscreteKind: return "DiscreteKind";
    case ErrorCode::ContinuousKind: return "ContinuousKind";
    case ErrorCode::OutOfSupport: return "OutOfSupport";
    case ErrorCode::DegenerateSample: return "DegenerateSample";
    case ErrorCode::UndefinedObservedStatistic: return "UndefinedObservedStatistic";
    case ErrorCode::ResampleBudgetExceeded: return "ResampleBudgetExceeded";
    case ErrorCode::TrueDensityZero: return "TrueDensityZero";
    case ErrorCode::IndivisibleN: return "IndivisibleN";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace irt
