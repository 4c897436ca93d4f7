#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uosdiff {

enum class ErrorKind {
  AllZeroInput,
  DimensionMismatch,
  InvalidDims,
  InvalidArgument,
  NonpositiveTime,
  InvalidRange,
  BudgetExceeded,
  EmptyRecovery,
  EmptyComponent,
  NonFiniteState,
  SizeMismatch,
  SizeCap,
  InsufficientPoints,
  RecoveryFailed,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries an ErrorKind so callers and
/// tests can dispatch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

inline void require_positive_time(double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::NonpositiveTime, "time must be positive, got " + std::to_string(t));
}

}  // namespace detail
}  // namespace uosdiff
