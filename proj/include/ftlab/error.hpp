#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ftlab {

/// Failure categories raised by the analysis, generation and environment
/// layers. The server maps each one onto a wire error code.
enum class ErrorCode {
  kMissingAssignment,
  kUnknownId,
  kBadOrder,
  kInvalidTree,
  kSharedSubtree,
  kCapacityExceeded,
  kCutSetLimit,
  kMissingProbability,
  kMissingTruth,
  kTooLarge,
  kInfeasibleConfig,
  kEpisodeDone,
  kBadAction,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ftlab
