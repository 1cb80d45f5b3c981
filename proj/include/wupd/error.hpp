#pragma once

#include <stdexcept>
#include <string>

namespace wupd {

enum class ErrorKind {
  NonPositiveValue,
  NonFiniteIntegral,
  LengthMismatch,
  NonPositiveGamma,
  IndexOutOfRange,
  GridMismatch,
  InvalidGrid,
  InvalidParameter,
  NonPositiveWeight,
  DivergentResult,
  SupportMismatch,
  NotADispersionPair,
  InvariantViolation,
  InsufficientData,
  SearchBoxInvalid,
  UnsupportedModel,
  ConfigInvalid,
  IoError,
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NonPositiveValue: return "NonPositiveValue";
    case ErrorKind::NonFiniteIntegral: return "NonFiniteIntegral";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NonPositiveGamma: return "NonPositiveGamma";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::InvalidGrid: return "InvalidGrid";
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorKind::DivergentResult: return "DivergentResult";
    case ErrorKind::SupportMismatch: return "SupportMismatch";
    case ErrorKind::NotADispersionPair: return "NotADispersionPair";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::SearchBoxInvalid: return "SearchBoxInvalid";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wupd
