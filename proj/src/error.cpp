#include "czdo/error.hpp"

namespace czdo {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Dimension: return "Dimension";
    case ErrorCode::IterationLimit: return "IterationLimit";
    case ErrorCode::MixedBound: return "MixedBound";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NotExistent: return "NotExistent";
    case ErrorCode::DeltaTooSmall: return "DeltaTooSmall";
    case ErrorCode::InternalDisagreement: return "InternalDisagreement";
    case ErrorCode::EmptyPosterior: return "EmptyPosterior";
    case ErrorCode::InfeasibleTrajectory: return "InfeasibleTrajectory";
    case ErrorCode::RejectionStall: return "RejectionStall";
    case ErrorCode::ContainmentViolation: return "ContainmentViolation";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace czdo
