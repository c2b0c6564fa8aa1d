#include "ftlab/error.hpp"

namespace ftlab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMissingAssignment: return "MissingAssignment";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kBadOrder: return "BadOrder";
    case ErrorCode::kInvalidTree: return "InvalidTree";
    case ErrorCode::kSharedSubtree: return "SharedSubtree";
    case ErrorCode::kCapacityExceeded: return "CapacityExceeded";
    case ErrorCode::kCutSetLimit: return "CutSetLimit";
    case ErrorCode::kMissingProbability: return "MissingProbability";
    case ErrorCode::kMissingTruth: return "MissingTruth";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kInfeasibleConfig: return "InfeasibleConfig";
    case ErrorCode::kEpisodeDone: return "EpisodeDone";
    case ErrorCode::kBadAction: return "BadAction";
  }
  return "Unknown";
}

}  // namespace ftlab
