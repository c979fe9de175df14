#pragma once

#include <stdexcept>
#include <string>

namespace ldp {

enum class ErrorCode {
  NonIncreasingKnots,
  NoFiniteValue,
  NonContiguousDomain,
  NotConvex,
  ShapeMismatch,
  MissingZeroKnot,
  EmptyBatch,
  EmptyProbeGrid,
  InvalidMeasure,
  InvalidModel,
  UnsupportedModel,
  UnsupportedClosedForm,
  Unclassified,
  EnumerationTooLarge,
  InvalidArgument,
  InputParse,
  Infeasible,
};

const char* to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ldp
