#pragma once

#include <stdexcept>
#include <string>

namespace mfnas {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MFNAS_DECLARE_ERROR(Name)            \
  class Name : public Error {                \
   public:                                   \
    using Error::Error;                      \
  }

MFNAS_DECLARE_ERROR(InvalidGenotype);
MFNAS_DECLARE_ERROR(InvalidArchId);
MFNAS_DECLARE_ERROR(InvalidSpace);
MFNAS_DECLARE_ERROR(InvalidCost);
MFNAS_DECLARE_ERROR(InvalidMetricInput);
MFNAS_DECLARE_ERROR(InvalidAlpha);
MFNAS_DECLARE_ERROR(InvalidConfig);
MFNAS_DECLARE_ERROR(MissingEntry);
MFNAS_DECLARE_ERROR(EmptyRun);
MFNAS_DECLARE_ERROR(InsufficientData);
MFNAS_DECLARE_ERROR(RefusedExpensiveOracle);

// Failures of an evaluator backend. The harness treats these as trial failures.
MFNAS_DECLARE_ERROR(EvaluatorError);

class EvaluatorTimeout : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

class ProtocolError : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

class EvaluatorDied : public EvaluatorError {
 public:
  using EvaluatorError::EvaluatorError;
};

#undef MFNAS_DECLARE_ERROR

}  // namespace mfnas
