#include "qcrb/errors.hpp"

namespace qcrb {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEmptyList:
      return "EmptyList";
    case ErrorKind::kNonSquareFactor:
      return "NonSquareFactor";
    case ErrorKind::kNotHermitian:
      return "NotHermitian";
    case ErrorKind::kNotPositive:
      return "NotPositive";
    case ErrorKind::kInvalidState:
      return "InvalidState";
    case ErrorKind::kInvalidPovm:
      return "InvalidPovm";
    case ErrorKind::kDimensionMismatch:
      return "DimensionMismatch";
    case ErrorKind::kEvaluationFailure:
      return "EvaluationFailure";
    case ErrorKind::kDerivativeOutsideSupport:
      return "DerivativeOutsideSupportCompatibility";
    case ErrorKind::kSingularOutcome:
      return "SingularOutcome";
    case ErrorKind::kSingularSensitivity:
      return "SingularSensitivity";
    case ErrorKind::kVariantInapplicable:
      return "VariantInapplicable";
    case ErrorKind::kInvalidCoefficients:
      return "InvalidCoefficients";
    case ErrorKind::kInsufficientSamples:
      return "InsufficientSamples";
    case ErrorKind::kInsufficientTrials:
      return "InsufficientTrials";
    case ErrorKind::kFlatLikelihood:
      return "FlatLikelihood";
    case ErrorKind::kPreconditionViolated:
      return "PreconditionViolated";
    case ErrorKind::kNumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

}  // namespace qcrb
