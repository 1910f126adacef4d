#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace ipstat {

enum class ErrorCode {
  MalformedAddress,
  OctetOutOfRange,
  IoError,
  CounterFinalized,
  CountOverflow,
  SourceNotReplayable,
  AllocationFailure,
  InvalidArgument,
  InvalidPlan,
  InvalidSpec,
  Mismatch,
  ValidationFailure,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedAddress: return "MalformedAddress";
    case ErrorCode::OctetOutOfRange: return "OctetOutOfRange";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CounterFinalized: return "CounterFinalized";
    case ErrorCode::CountOverflow: return "CountOverflow";
    case ErrorCode::SourceNotReplayable: return "SourceNotReplayable";
    case ErrorCode::AllocationFailure: return "AllocationFailure";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPlan: return "InvalidPlan";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Mismatch: return "Mismatch";
    case ErrorCode::ValidationFailure: return "ValidationFailure";
  }
  return "Unknown";
}

/// Every failure raised by the library. `line()` is set for record-file
/// parse errors (1-based line for text files, record ordinal for binary).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::uint64_t> line = std::nullopt)
      : std::runtime_error(compose(code, message, line)),
        code_(code),
        message_(message),
        line_(line) {}

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code and line decoration of what().
  const std::string& message() const noexcept { return message_; }
  std::optional<std::uint64_t> line() const noexcept { return line_; }

 private:
  static std::string compose(ErrorCode code, const std::string& message,
                             std::optional<std::uint64_t> line) {
    std::string out = to_string(code);
    if (line) out += " at line " + std::to_string(*line);
    out += ": ";
    out += message;
    return out;
  }

  ErrorCode code_;
  std::string message_;
  std::optional<std::uint64_t> line_;
};

}  // namespace ipstat
