#pragma once

#include <cstdarg>
#include <stdexcept>
#include <string>
#include <vector>

namespace capfield {

// Config problems map to CLI exit 1, numeric failures to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroDenominator : NumericError {
  using NumericError::NumericError;
};

struct ZeroF : NumericError {
  using NumericError::NumericError;
};

struct NonPositiveTau : NumericError {
  using NumericError::NumericError;
};

struct DegenerateVolume : NumericError {
  using NumericError::NumericError;
};

struct OutOfEnvelope : NumericError {
  using NumericError::NumericError;
};
using PcfOutOfEnvelope = OutOfEnvelope;

struct UnstableStep : NumericError {
  using NumericError::NumericError;
};

struct TailTooHeavy : NumericError {
  using NumericError::NumericError;
};

struct NoConvergence : NumericError {
  NoConvergence(const std::string& what, std::vector<double> history)
      : NumericError(what), residual_history(std::move(history)) {}
  std::vector<double> residual_history;
};

// Log level from CAPFIELD_LOG (error|info|debug), default error.
enum class LogLevel { error = 0, info = 1, debug = 2 };

LogLevel log_level();
void log_msg(LogLevel lvl, const char* fmt, ...);

#define CF_LOG_ERROR(...) ::capfield::log_msg(::capfield::LogLevel::error, __VA_ARGS__)
#define CF_LOG_INFO(...) ::capfield::log_msg(::capfield::LogLevel::info, __VA_ARGS__)
#define CF_LOG_DEBUG(...) ::capfield::log_msg(::capfield::LogLevel::debug, __VA_ARGS__)

}  // namespace capfield
