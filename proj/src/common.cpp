#include "wpath/common.hpp"

namespace wpath {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateDomain: return "DegenerateDomain";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::InvalidShape: return "InvalidShape";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::StepLeftDomain: return "StepLeftDomain";
    case ErrorCode::CenteringStalled: return "CenteringStalled";
    case ErrorCode::InfeasibleStart: return "InfeasibleStart";
    case ErrorCode::RepairHypothesisViolated: return "RepairHypothesisViolated";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::MalformedNetwork: return "MalformedNetwork";
    case ErrorCode::BadTarget: return "BadTarget";
    case ErrorCode::TargetInfeasible: return "TargetInfeasible";
    case ErrorCode::RoundingFailed: return "RoundingFailed";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
  }
  return "Unknown";
}

}  // namespace wpath
