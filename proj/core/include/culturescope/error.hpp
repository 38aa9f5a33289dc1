#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace culturescope {

enum class ErrorCode {
  kParse,
  kValidation,
  kLookup,
  kPrecondition,
  kLevel,
  kAuth,
  kRateLimit,
  kTimeout,
  kTransport,
  kRequest,
  kSampling,
  kGeneration,
  kPartialDataset,
  kIntegrity,
  kUndefinedMetric,
  kStage,
  kIo,
  kUsage,
  kConfig,
};

// Stable machine-readable name, e.g. "rate_limit".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Transient provider failures eligible for retry.
inline bool is_retriable(ErrorCode code) {
  return code == ErrorCode::kRateLimit || code == ErrorCode::kTimeout ||
         code == ErrorCode::kTransport;
}

}  // namespace culturescope
