#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eprb {

enum class ErrorKind {
  NonMonotonicTime,
  MixedIsland,
  BadOutcome,
  InvalidValue,
  ConfigMismatch,
  ConfigParse,
  InvalidStream,
  EmptyCell,
  TooLarge,
  MalformedTuple,
  SettingCollision,
  SupportViolation,
  FormatError,
  IoError,
  Internal,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonMonotonicTime: return "NonMonotonicTime";
    case ErrorKind::MixedIsland: return "MixedIsland";
    case ErrorKind::BadOutcome: return "BadOutcome";
    case ErrorKind::InvalidValue: return "InvalidValue";
    case ErrorKind::ConfigMismatch: return "ConfigMismatch";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::InvalidStream: return "InvalidStream";
    case ErrorKind::EmptyCell: return "EmptyCell";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::MalformedTuple: return "MalformedTuple";
    case ErrorKind::SettingCollision: return "SettingCollision";
    case ErrorKind::SupportViolation: return "SupportViolation";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

/// Every failure in the library carries one of the kinds above so the CLI
/// can map it onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace eprb
