#include "levelset/error.hpp"

namespace lsq {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::BadSum: return "BadSum";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Unsampleable: return "Unsampleable";
    case ErrorCode::OffSupportPoint: return "OffSupportPoint";
    case ErrorCode::InteriorRequired: return "InteriorRequired";
    case ErrorCode::InconsistentRatios: return "InconsistentRatios";
    case ErrorCode::BadPair: return "BadPair";
    case ErrorCode::NotRefinable: return "NotRefinable";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::NotStandardizable: return "NotStandardizable";
    case ErrorCode::DegenerateRegions: return "DegenerateRegions";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::InconsistentPoint: return "InconsistentPoint";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::NoCrossing: return "NoCrossing";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::Data: return "DataError";
    case ErrorCode::Protocol: return "SubprocessProtocolError";
  }
  return "Unknown";
}

}  // namespace lsq
