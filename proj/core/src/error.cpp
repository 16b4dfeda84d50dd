#include "rirkit/error.hpp"

namespace rirkit {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kConfiguration: return "configuration";
    case ErrorCode::kDegenerateSignal: return "degenerate-signal";
    case ErrorCode::kInsufficientDecay: return "insufficient-decay";
    case ErrorCode::kInvalidValue: return "invalid-value";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kCorruptCodegram: return "corrupt-codegram";
    case ErrorCode::kCorruptSequence: return "corrupt-sequence";
    case ErrorCode::kDegenerateDistribution: return "degenerate-distribution";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kManifest: return "manifest";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace rirkit
