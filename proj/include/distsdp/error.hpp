#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace distsdp {

enum class ErrorCode {
  ZeroVector,
  DimensionMismatch,
  InvalidProblem,
  MultipleParents,
  DisconnectedAgents,
  OrphanIndex,
  OwnershipViolation,
  CyclicPrecedence,
  BadSigma,
  NotAChild,
  NoParent,
  MissingMessage,
  StaleBeyondB,
  TooLarge,
  TooManyAgents,
  UnsupportedFormat,
  CorruptHeader,
  TruncatedPixelData,
  Io,
};

/// Upper-snake name used in the CLI's `error=<CODE>` prefix.
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace distsdp
