#include "culturescope/error.hpp"

namespace culturescope {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kLookup: return "lookup";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kLevel: return "level";
    case ErrorCode::kAuth: return "auth";
    case ErrorCode::kRateLimit: return "rate_limit";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kRequest: return "request";
    case ErrorCode::kSampling: return "sampling";
    case ErrorCode::kGeneration: return "generation";
    case ErrorCode::kPartialDataset: return "partial_dataset";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kStage: return "stage";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kUsage: return "usage";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace culturescope
