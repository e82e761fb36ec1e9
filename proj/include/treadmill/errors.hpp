#pragma once

#include <stdexcept>
#include <string>

namespace treadmill {

/// Broad failure class; the CLI maps each one to an exit code.
enum class ErrorCategory { Parse, Config, Analysis };

/// Base of every error raised by the library. `code()` is a stable
/// machine-readable identifier such as "NoPeak" or "ProtocolMismatch".
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string code, const std::string& what)
      : std::runtime_error(what), category_(category), code_(std::move(code)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorCategory category_;
  std::string code_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what)
      : Error(ErrorCategory::Parse, "ParseError", what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::Config, "ConfigError", what) {}
};

class AnalysisError : public Error {
 public:
  AnalysisError(std::string code, const std::string& what)
      : Error(ErrorCategory::Analysis, std::move(code), what) {}
};

#define TREADMILL_ANALYSIS_ERROR(Name)                                    \
  class Name : public AnalysisError {                                     \
   public:                                                                \
    explicit Name(const std::string& what) : AnalysisError(#Name, what) {} \
  }

// plate-design / sensing-model
TREADMILL_ANALYSIS_ERROR(InvalidSpec);
TREADMILL_ANALYSIS_ERROR(UnknownAccuracyClass);
// signal-analysis
TREADMILL_ANALYSIS_ERROR(ChannelMissing);
TREADMILL_ANALYSIS_ERROR(NoPeak);
TREADMILL_ANALYSIS_ERROR(TooFewPeaks);
TREADMILL_ANALYSIS_ERROR(NonDecayingEnvelope);
// calibration
TREADMILL_ANALYSIS_ERROR(ProtocolMismatch);
TREADMILL_ANALYSIS_ERROR(IllConditionedFit);
TREADMILL_ANALYSIS_ERROR(InsufficientPoints);
TREADMILL_ANALYSIS_ERROR(QueryOutsideHull);
// cop
TREADMILL_ANALYSIS_ERROR(InsufficientLoad);
TREADMILL_ANALYSIS_ERROR(DegenerateDirections);
TREADMILL_ANALYSIS_ERROR(RankDeficient);
TREADMILL_ANALYSIS_ERROR(OutOfBounds);
// gait
TREADMILL_ANALYSIS_ERROR(NoStridesDetected);

#undef TREADMILL_ANALYSIS_ERROR

}  // namespace treadmill
