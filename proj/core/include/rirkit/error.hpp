#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rirkit {

enum class ErrorCode {
  kConfiguration,
  kDegenerateSignal,
  kInsufficientDecay,
  kInvalidValue,
  kShape,
  kCorruptCodegram,
  kCorruptSequence,
  kDegenerateDistribution,
  kDivergence,
  kManifest,
  kIo,
};

/// Stable kebab-case name of an error code, e.g. "degenerate-signal".
std::string_view error_code_name(ErrorCode code) noexcept;

/// The single exception type thrown by rirkit. The code identifies the
/// failure class so callers (batch drivers in particular) can decide whether
/// to discard a sample or abort.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rirkit
