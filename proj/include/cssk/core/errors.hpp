#pragma once

#include <stdexcept>
#include <string>

namespace cssk {

enum class ErrorCode {
  DimensionMismatch,
  MaskBindingMismatch,
  SourceOutOfBounds,
  KernelTooLong,
  BlockNotDivisible,
  EmptyCandidates,
  LineSearchFailure,
  UnknownMethod,
  BadMagic,
  UnsupportedVersion,
  TruncatedFile,
  ValidationError,
  IoError,
  ConfigError,
};

const char* error_code_name(ErrorCode code);

/// Exception carrying a machine-checkable error code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace cssk
