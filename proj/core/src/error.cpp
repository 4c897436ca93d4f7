#include "uosdiff/error.hpp"

namespace uosdiff {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::AllZeroInput: return "AllZeroInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidDims: return "InvalidDims";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonpositiveTime: return "NonpositiveTime";
    case ErrorKind::InvalidRange: return "InvalidRange";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::EmptyRecovery: return "EmptyRecovery";
    case ErrorKind::EmptyComponent: return "EmptyComponent";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::SizeCap: return "SizeCap";
    case ErrorKind::InsufficientPoints: return "InsufficientPoints";
    case ErrorKind::RecoveryFailed: return "RecoveryFailed";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace uosdiff
