#include "ldp/error.hpp"

namespace ldp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonIncreasingKnots: return "NonIncreasingKnots";
    case ErrorCode::NoFiniteValue: return "NoFiniteValue";
    case ErrorCode::NonContiguousDomain: return "NonContiguousDomain";
    case ErrorCode::NotConvex: return "NotConvex";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::MissingZeroKnot: return "MissingZeroKnot";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::EmptyProbeGrid: return "EmptyProbeGrid";
    case ErrorCode::InvalidMeasure: return "InvalidMeasure";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::UnsupportedModel: return "UnsupportedModel";
    case ErrorCode::UnsupportedClosedForm: return "UnsupportedClosedForm";
    case ErrorCode::Unclassified: return "Unclassified";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InputParse: return "InputParse";
    case ErrorCode::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

}  // namespace ldp
