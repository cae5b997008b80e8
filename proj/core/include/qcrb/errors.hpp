#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcrb {

enum class ErrorKind {
  kEmptyList,
  kNonSquareFactor,
  kNotHermitian,
  kNotPositive,
  kInvalidState,
  kInvalidPovm,
  kDimensionMismatch,
  kEvaluationFailure,
  kDerivativeOutsideSupport,
  kSingularOutcome,
  kSingularSensitivity,
  kVariantInapplicable,
  kInvalidCoefficients,
  kInsufficientSamples,
  kInsufficientTrials,
  kFlatLikelihood,
  kPreconditionViolated,
  kNumericalFailure,
};

std::string_view error_kind_name(ErrorKind kind);

// Base for every error raised by the library. The kind is stable and is
// what the CLI maps to exit codes and JSON error objects.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

template <ErrorKind K>
class TypedError : public Error {
 public:
  explicit TypedError(const std::string& what) : Error(K, what) {}
};

using EmptyList = TypedError<ErrorKind::kEmptyList>;
using NonSquareFactor = TypedError<ErrorKind::kNonSquareFactor>;
using NotHermitian = TypedError<ErrorKind::kNotHermitian>;
using NotPositive = TypedError<ErrorKind::kNotPositive>;
using InvalidState = TypedError<ErrorKind::kInvalidState>;
using InvalidPovm = TypedError<ErrorKind::kInvalidPovm>;
using DimensionMismatch = TypedError<ErrorKind::kDimensionMismatch>;
using EvaluationFailure = TypedError<ErrorKind::kEvaluationFailure>;
using DerivativeOutsideSupport =
    TypedError<ErrorKind::kDerivativeOutsideSupport>;
using SingularOutcome = TypedError<ErrorKind::kSingularOutcome>;
using SingularSensitivity = TypedError<ErrorKind::kSingularSensitivity>;
using VariantInapplicable = TypedError<ErrorKind::kVariantInapplicable>;
using InvalidCoefficients = TypedError<ErrorKind::kInvalidCoefficients>;
using InsufficientSamples = TypedError<ErrorKind::kInsufficientSamples>;
using InsufficientTrials = TypedError<ErrorKind::kInsufficientTrials>;
using FlatLikelihood = TypedError<ErrorKind::kFlatLikelihood>;
using PreconditionViolated = TypedError<ErrorKind::kPreconditionViolated>;
using NumericalFailure = TypedError<ErrorKind::kNumericalFailure>;

}  // namespace qcrb
